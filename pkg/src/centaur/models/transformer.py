"""Board-token transformer manager.

Input: the 68-token board sequence; output: two logits (first team member
vs second).  Every attention matrix is kept reachable because the
explainability probes read the CLS token's rows.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import torch
from torch import nn

from centaur.chess import Position, tokenize
from centaur.chess.tokens import GLOBAL_VOCAB, SEQUENCE_LENGTH, TokenSequence

CLS_POSITION = SEQUENCE_LENGTH - 1


@dataclass(frozen=True)
class TransformerConfig:
    layers: int = 4
    heads: int = 4
    dim: int = 128
    ff_dim: int = 512
    head_hidden: int = 128
    zero_init_head: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.dim % self.heads:
            raise ValueError("dim must be divisible by heads")


class _EncoderLayer(nn.Module):
    """Pre-norm encoder block; forward returns (x, attention [B,H,T,T])."""

    def __init__(self, dim: int, heads: int, ff_dim: int):
        super().__init__()
        self.heads = heads
        self.head_dim = dim // heads
        self.norm_attn = nn.LayerNorm(dim)
        self.norm_ff = nn.LayerNorm(dim)
        self.qkv = nn.Linear(dim, 3 * dim)
        self.proj = nn.Linear(dim, dim)
        self.ff = nn.Sequential(nn.Linear(dim, ff_dim), nn.ReLU(),
                                nn.Linear(ff_dim, dim))

    def forward(self, x):
        batch, seq, dim = x.shape
        h = self.norm_attn(x)
        qkv = self.qkv(h).reshape(batch, seq, 3, self.heads, self.head_dim)
        qkv = qkv.permute(2, 0, 3, 1, 4)  # [3, B, H, T, hd]
        q, k, v = qkv[0], qkv[1], qkv[2]
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.head_dim)
        attn = torch.softmax(scores, dim=-1)  # [B, H, T, T]
        mixed = (attn @ v).transpose(1, 2).reshape(batch, seq, dim)
        x = x + self.proj(mixed)
        x = x + self.ff(self.norm_ff(x))
        return x, attn


class TransformerManager(nn.Module):
    """Token transformer with a CLS classifier head and seeded init."""

    def __init__(self, config: TransformerConfig = TransformerConfig()):
        super().__init__()
        self.config = config
        self.token_embedding = nn.Embedding(GLOBAL_VOCAB, config.dim)
        self.position_embedding = nn.Embedding(SEQUENCE_LENGTH, config.dim)
        self.layers = nn.ModuleList(
            _EncoderLayer(config.dim, config.heads, config.ff_dim)
            for _ in range(config.layers))
        self.final_norm = nn.LayerNorm(config.dim)
        self.head = nn.Sequential(
            nn.Linear(config.dim, config.head_hidden), nn.ReLU(),
            nn.Linear(config.head_hidden, 2))
        self._reset_parameters()

    def _reset_parameters(self):
        gen = torch.Generator().manual_seed(self.config.seed)
        for name, param in self.named_parameters():
            if param.dim() >= 2:
                param.data.normal_(0.0, 0.02, generator=gen)
            elif "weight" in name:  # LayerNorm scales
                param.data.fill_(1.0)
            else:
                param.data.zero_()
        # zero query maps: fresh models start with exactly uniform
        # attention (no systematic token bias before any training); keys
        # stay random so the query path still receives gradient
        for layer in self.layers:
            dim = self.config.dim
            layer.qkv.weight.data[:dim].zero_()
            layer.qkv.bias.data[:dim].zero_()
        if self.config.zero_init_head:
            final = self.head[-1]
            final.weight.data.zero_()
            final.bias.data.zero_()

    def forward_tokens(self, ids: torch.Tensor):
        """ids: long tensor [B, 68] of global token ids.

        Returns (logits [B, 2], attentions [B, L, H, 68, 68]).
        """
        if ids.dim() != 2 or ids.shape[1] != SEQUENCE_LENGTH:
            raise ValueError(f"expected [batch, {SEQUENCE_LENGTH}] token ids")
        if ids.min() < 0 or ids.max() >= GLOBAL_VOCAB:
            raise ValueError("token id outside the shared vocabulary")
        positions = torch.arange(SEQUENCE_LENGTH, device=ids.device)
        x = self.token_embedding(ids) + self.position_embedding(positions)
        stacked = []
        for layer in self.layers:
            x, attn = layer(x)
            stacked.append(attn)
        x = self.final_norm(x)
        logits = self.head(x[:, CLS_POSITION])
        return logits, torch.stack(stacked, dim=1)

    # -- single-sequence conveniences ------------------------------------

    def forward_sequence(self, tokens: TokenSequence):
        """(logits [2], attentions [L, H, 68, 68]) for one sequence."""
        ids = torch.tensor([tokens.global_ids()], dtype=torch.long)
        with torch.no_grad():
            logits, attn = self.forward_tokens(ids)
        return logits[0], attn[0]

    def choice_probabilities(self, p: Position):
        """(P(first member), P(second member)) for a position."""
        logits, _ = self.forward_sequence(tokenize(p))
        probs = torch.softmax(logits, dim=-1)
        return float(probs[0]), float(probs[1])

    def hyperparameters(self) -> dict:
        return asdict(self.config)


def forward(model: TransformerManager, tokens: TokenSequence):
    """Forward pass on one token sequence: (logits [2], attn [L,H,68,68])."""
    return model.forward_sequence(tokens)


def extract_cls_attention(model: TransformerManager, p: Position):
    """Mean CLS attention per square, averaged over layers and heads.

    Returns (squares, metadata): 64 square weights and the 4 metadata-token
    weights (side, castling, check, CLS itself), not renormalized.
    """
    _, attn = model.forward_sequence(tokenize(p))
    cls_rows = attn[:, :, CLS_POSITION, :]  # [L, H, 68]
    mean = cls_rows.mean(dim=(0, 1))
    return mean[:64].numpy().copy(), mean[64:].numpy().copy()

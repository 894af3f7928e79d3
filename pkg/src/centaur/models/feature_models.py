"""Managers over hand-crafted board features: a deep MLP distillation
student and a logistic-regression ablation."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn

from centaur.chess import Position, board_features

FEATURE_DIM = 15


@dataclass(frozen=True)
class FeatureMLPConfig:
    hidden_layers: int = 20
    width: int = 256
    seed: int = 0


class FeatureMLP(nn.Module):
    """Fully connected network: 15 features -> hidden stack -> 2 logits."""

    def __init__(self, config: FeatureMLPConfig = FeatureMLPConfig()):
        super().__init__()
        self.config = config
        dims = [FEATURE_DIM] + [config.width] * config.hidden_layers
        blocks = []
        for in_dim, out_dim in zip(dims, dims[1:]):
            blocks += [nn.Linear(in_dim, out_dim), nn.ReLU()]
        blocks.append(nn.Linear(dims[-1], 2))
        self.net = nn.Sequential(*blocks)
        gen = torch.Generator().manual_seed(config.seed)
        for param in self.parameters():
            if param.dim() >= 2:
                fan_in = param.shape[1]
                param.data.normal_(0.0, fan_in ** -0.5, generator=gen)
            else:
                param.data.zero_()

    def forward(self, x):
        return self.net(x)

    def choice_probabilities(self, p: Position):
        vec = torch.tensor([board_features(p).as_vector()],
                           dtype=torch.float32)
        with torch.no_grad():
            probs = torch.softmax(self.forward(vec), dim=-1)[0]
        return float(probs[0]), float(probs[1])

    def hyperparameters(self) -> dict:
        return asdict(self.config)


@dataclass(frozen=True)
class LogisticConfig:
    seed: int = 0


class LogisticManagerModel(nn.Module):
    """Affine map from the 15 features to 2 logits."""

    def __init__(self, config: LogisticConfig = LogisticConfig()):
        super().__init__()
        self.config = config
        self.linear = nn.Linear(FEATURE_DIM, 2)
        gen = torch.Generator().manual_seed(config.seed)
        self.linear.weight.data.normal_(0.0, 0.01, generator=gen)
        self.linear.bias.data.zero_()

    def forward(self, x):
        return self.linear(x)

    def choice_probabilities(self, p: Position):
        vec = torch.tensor([board_features(p).as_vector()],
                           dtype=torch.float32)
        with torch.no_grad():
            probs = torch.softmax(self.forward(vec), dim=-1)[0]
        return float(probs[0]), float(probs[1])

    def hyperparameters(self) -> dict:
        return asdict(self.config)

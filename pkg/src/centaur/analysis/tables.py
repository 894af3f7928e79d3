"""Feature-preference and human-likeness report tables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from centaur.chess import board_features, move_features
from centaur.chess.features import BOARD_FEATURE_NAMES, MOVE_FEATURE_NAMES
from centaur.analysis.stats import EffectReport, a_w, frequency_sem
from centaur.team import Member


@dataclass
class FeatureRow:
    feature: str
    mean_m: Optional[float]
    mean_l: Optional[float]
    effect: Optional[EffectReport]


@dataclass
class FeaturePreferenceTable:
    rows: list
    n_m: int
    n_l: int
    empty_member: Optional[str] = None  # flagged when a column has no data


def feature_preference_table(decisions) -> FeaturePreferenceTable:
    """Per board feature: mean where member M was preferred vs member L,
    with the directional effect size.

    `decisions` is a list of (Position, resolved Member).  A member with
    zero decisions leaves its column empty-flagged rather than failing.
    """
    values_m = []
    values_l = []
    for position, member in decisions:
        vec = board_features(position).as_vector()
        (values_m if member is Member.M else values_l).append(vec)

    empty = None
    if not values_m:
        empty = "M"
    elif not values_l:
        empty = "L"

    rows = []
    for i, name in enumerate(BOARD_FEATURE_NAMES):
        col_m = [v[i] for v in values_m]
        col_l = [v[i] for v in values_l]
        mean_m = sum(col_m) / len(col_m) if col_m else None
        mean_l = sum(col_l) / len(col_l) if col_l else None
        effect = a_w(col_m, col_l) if col_m and col_l else None
        rows.append(FeatureRow(feature=name, mean_m=mean_m, mean_l=mean_l,
                               effect=effect))
    return FeaturePreferenceTable(rows=rows, n_m=len(values_m),
                                  n_l=len(values_l), empty_member=empty)


@dataclass
class FrequencyRow:
    feature: str
    freq_m: float
    sem_m: float
    freq_l: float
    sem_l: float


@dataclass
class HumanLikenessReport:
    rows: list
    n_pairs: int


def humanlikeness_report(pairs) -> HumanLikenessReport:
    """Move-feature frequencies among the two members' recommendations.

    `pairs` is a list of (Position, rec_m Move, rec_l Move) gathered at
    disagreement states only.  SEM per frequency is sqrt(f(1-f)/n).
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("no recommendation pairs")
    vectors_m = []
    vectors_l = []
    for position, rec_m, rec_l in pairs:
        vectors_m.append(move_features(position, rec_m).as_vector())
        vectors_l.append(move_features(position, rec_l).as_vector())
    n = len(pairs)
    rows = []
    for i, name in enumerate(MOVE_FEATURE_NAMES):
        freq_m = sum(v[i] for v in vectors_m) / n
        freq_l = sum(v[i] for v in vectors_l) / n
        rows.append(FrequencyRow(
            feature=name, freq_m=freq_m, sem_m=frequency_sem(freq_m, n),
            freq_l=freq_l, sem_l=frequency_sem(freq_l, n)))
    return HumanLikenessReport(rows=rows, n_pairs=n)

"""Evaluation statistics, explainability probes, and report tables."""

from centaur.analysis.plots import bar_chart_svg, box_plot_svg, probe_report_box_svg
from centaur.analysis.probes import (
    MoveAttentionReport,
    ProbeReport,
    attention_probe_attacked,
    attention_probe_moves,
    attention_probe_pieces,
    model_hash,
    untrained_twin,
)
from centaur.analysis.stats import (
    BoxStats,
    EffectReport,
    MatchSummary,
    a_w,
    frequency_sem,
    sem,
    wdl,
    z_score,
)
from centaur.analysis.tables import (
    FeaturePreferenceTable,
    FeatureRow,
    FrequencyRow,
    HumanLikenessReport,
    feature_preference_table,
    humanlikeness_report,
)

__all__ = [
    "bar_chart_svg", "box_plot_svg", "probe_report_box_svg",
    "MoveAttentionReport", "ProbeReport", "attention_probe_attacked",
    "attention_probe_moves", "attention_probe_pieces", "model_hash",
    "untrained_twin", "BoxStats", "EffectReport", "MatchSummary", "a_w",
    "frequency_sem", "sem", "wdl", "z_score", "FeaturePreferenceTable",
    "FeatureRow", "FrequencyRow", "HumanLikenessReport",
    "feature_preference_table", "humanlikeness_report",
]

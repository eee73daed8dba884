from .dataset import DatasetError, load_dataset, write_dataset
from .metrics import (
    BootstrapEstimate,
    EmptyRecordsError,
    MetricsReport,
    UndefinedMetricError,
    bootstrap_se,
    collapse_distribution,
    compute_report,
    coverage,
    macro_f1_given_abstention,
    mean_time,
    mean_tokens,
    truth_value_distribution,
)
from .negatives import NegativeFormatError, extract_json_object, generate_negatives, parse_negatives
from .report import render_json, render_text
from .runner import EvaluationRecord, Runner, item_key, load_records, run_evaluation, write_records

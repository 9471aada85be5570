"""Upper-limb dot-tracing exergame: task geometry, session engine,
simulated resistance sensing, normalized metrics, experiment design, and
repeated-measures statistics, plus batch simulation and a WebSocket
session service."""

from .cohort import (CONDITION_LABELS, CONDITIONS, VARIABLES, CohortAnalysis,
                     SimPolicy, analyze_cohort, condition_label,
                     parse_condition, read_manifest, simulate_cohort)
from .design import (LatinSquare, PowerSpec, assign_conditions,
                     balanced_latin_square, eta2_to_f, power_from_eta2,
                     power_table, required_sample_size, rm_anova_power)
from .errors import (DataFormatError, DegenerateDataError, DomainError,
                     DotTraceError, EmptyDataError, IncompleteSessionError,
                     InfeasibleDesignError, ParameterError, ReachError,
                     SequencingError, TraceAlignmentError,
                     UnsupportedOrderError)
from .geometry import (DOT_COUNTS, Configuration, Dot, DotModel, ModelParams,
                       Orientation, canonical_dots, generate_model, query_hit,
                       transform_orientation, write_model_csv)
from .metrics import (MetricsRecord, build_record, compute_mistakes,
                      compute_resistance_metric, compute_tct,
                      read_metrics_csv, write_metrics_csv)
from .sensor import (ArmModel, SensorSample, SensorTrace, default_arm,
                     elbow_angle, estimate_rm, mean_resistance_change,
                     read_trace_csv, resistance_change_series,
                     resistance_from_angle, simulate_trace, write_trace_csv)
from .session import (ENGINE_VERSION, BrushSample, DrawingSession, EventKind,
                      SessionEvent, SessionLog, open_session, parse_log,
                      read_session_log, serialize_log, write_session_log)
from .stats import (AnovaEffect, CellTable, Descriptives, LikertSummary,
                    ShapiroResult, TTestResult, bonferroni, descriptives,
                    eta2_label, likert_descriptives, paired_t, rm_anova_2x2,
                    shapiro_wilk, ss_decomposition)

__version__ = "0.1.0"

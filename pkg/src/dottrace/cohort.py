"""Cohort simulation and batch analysis.

Simulation drives a scripted brush over each dot model: legs between
outline-adjacent dots run along the surface, while out-of-order visits hop
off the surface (lift past the deepest dot plus a clearance, cruise, drop)
so they cannot brush intermediate dots. Each planned adjacent swap
therefore yields exactly one mistake, and a fully ordered trace yields
none. All randomness flows from one root seed through per-session spawn
keys, so a rerun reproduces every byte.

Analysis reads a manifest back, computes per-session metrics, and writes
descriptive, normality, ANOVA, and pairwise-contrast reports.
"""

import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .design import assign_conditions, balanced_latin_square
from .errors import DataFormatError, DegenerateDataError, ParameterError
from .geometry import (Configuration, ModelParams, Orientation,
                       generate_model)
from .metrics import MetricsRecord, build_record, write_metrics_csv
from .sensor import ArmModel, default_arm, read_trace_csv, simulate_trace, write_trace_csv
from .session import (ENGINE_VERSION, BrushSample, DrawingSession,
                      read_session_log, write_session_log)
from .stats import (CellTable, bonferroni, descriptives, eta2_label,
                    paired_t, rm_anova_2x2, shapiro_wilk)

MANIFEST_FORMAT = "dottrace-manifest/1"

CONDITIONS = (
    (Orientation.VERTICAL, Configuration.FLAT),
    (Orientation.VERTICAL, Configuration.CURVED),
    (Orientation.HORIZONTAL, Configuration.FLAT),
    (Orientation.HORIZONTAL, Configuration.CURVED),
)


def condition_label(orientation: Orientation, configuration: Configuration) -> str:
    return f"{orientation.value}-{configuration.value}"


def parse_condition(label: str):
    try:
        o, c = label.split("-")
        return Orientation(o), Configuration(c)
    except ValueError as exc:
        raise DataFormatError(f"bad condition label {label!r}") from exc


CONDITION_LABELS = tuple(condition_label(o, c) for o, c in CONDITIONS)

VARIABLES = ("norm_tct", "norm_mistakes", "norm_resistance")


@dataclass(frozen=True)
class SimPolicy:
    """Scripted-tracer behavior; per-condition scales inject true effects."""
    speed: float = 0.6               # brush travel speed, m/s
    dwell: float = 0.30              # pause on each dot, s
    jitter_sd: float = 0.001         # hand tremor, m
    out_of_order_prob: float = 0.05  # chance of swapping each adjacent pair
    sample_rate: float = 50.0        # brush samples per second
    speed_rel_sd: float = 0.10       # per-session lognormal speed spread
    dwell_rel_sd: float = 0.10       # per-session lognormal dwell spread
    hop_clearance: float = 0.05      # lift above the dot plane for skips, m
    seed: int = 0
    condition_speed_scale: dict = field(default_factory=dict)  # label -> factor
    condition_dwell_scale: dict = field(default_factory=dict)  # label -> factor

    def validate(self):
        for name in ("speed", "dwell", "jitter_sd", "sample_rate",
                     "speed_rel_sd", "dwell_rel_sd", "hop_clearance"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ParameterError(f"{name} must be >= 0, got {v}")
        if self.speed <= 0 or self.sample_rate <= 0 or self.dwell <= 0:
            raise ParameterError("speed, dwell, and sample_rate must be positive")
        if not 0.0 <= self.out_of_order_prob <= 1.0:
            raise ParameterError(
                f"out_of_order_prob must be in [0, 1], got {self.out_of_order_prob}")
        for scales in (self.condition_speed_scale, self.condition_dwell_scale):
            for label, factor in scales.items():
                try:
                    parse_condition(label)
                except DataFormatError as exc:
                    raise ParameterError(
                        f"unknown condition label {label!r}") from exc
                if not (math.isfinite(factor) and factor > 0):
                    raise ParameterError(
                        f"scale for {label!r} must be > 0, got {factor}")


def _hop_direction(orientation: Orientation) -> np.ndarray:
    # off-surface axis: toward the user for wall-mounted, up for tabletop
    if orientation is Orientation.VERTICAL:
        return np.array([0.0, 0.0, -1.0])
    return np.array([0.0, 1.0, 0.0])


def _plan_order(n_dots: int, prob: float, rng) -> tuple:
    """Outline order with independent adjacent swaps; returns (order, swaps)."""
    order = list(range(n_dots))
    swaps = 0
    k = 0
    while k < n_dots - 1:
        if prob > 0.0 and rng.random() < prob:
            order[k], order[k + 1] = order[k + 1], order[k]
            swaps += 1
            k += 2
        else:
            k += 1
    return order, swaps


def simulate_session(model, participant_id: str, policy: SimPolicy, rng,
                     arm: ArmModel, r_base: float, alpha: float,
                     noise_sd: float):
    """Run one scripted session; returns (log, trace, planned_swaps)."""
    label = condition_label(model.orientation, model.configuration)
    sensor_seed = int(rng.integers(0, 2 ** 63))
    speed = (policy.speed * math.exp(rng.normal(0.0, policy.speed_rel_sd))
             * policy.condition_speed_scale.get(label, 1.0))
    dwell = (policy.dwell * math.exp(rng.normal(0.0, policy.dwell_rel_sd))
             * policy.condition_dwell_scale.get(label, 1.0))
    order, swaps = _plan_order(model.dot_count, policy.out_of_order_prob, rng)

    hop_dir = _hop_direction(model.orientation)
    offsets = model.positions @ hop_dir
    hop_level = float(offsets.max()) + policy.hop_clearance
    dt = 1.0 / policy.sample_rate
    n_dwell = max(1, round(dwell / dt))
    max_land = 0.4 * model.hit_radius

    def landing(idx):
        off = rng.normal(0.0, policy.jitter_sd, 3)
        norm = float(np.linalg.norm(off))
        if norm > max_land:
            off *= max_land / norm
        return model.positions[idx] + off

    def lift(point):
        return point + hop_dir * (hop_level - float(point @ hop_dir))

    session = DrawingSession(model, participant_id)
    positions = []

    def emit(point):
        positions.append(np.asarray(point, dtype=float))

    def travel(waypoints, land_exact):
        for wi in range(len(waypoints) - 1):
            seg_a = np.asarray(waypoints[wi], dtype=float)
            seg_b = np.asarray(waypoints[wi + 1], dtype=float)
            length = float(np.linalg.norm(seg_b - seg_a))
            n_steps = max(1, math.ceil(length / speed / dt))
            final_seg = wi == len(waypoints) - 2
            for k in range(1, n_steps + 1):
                point = seg_a + (k / n_steps) * (seg_b - seg_a)
                if final_seg and k == n_steps and land_exact:
                    emit(point)
                else:
                    emit(point + rng.normal(0.0, policy.jitter_sd, 3))

    current = lift(model.positions[order[0]])
    emit(current)
    for oi, target in enumerate(order):
        end = landing(target)
        prev = order[oi - 1] if oi else None
        if prev is None or abs(target - prev) != 1:
            travel([current, lift(current), lift(end), end], land_exact=True)
        else:
            travel([current, end], land_exact=True)
        current = end
        if oi < len(order) - 1:
            # hold on the dot; jitter around the fixed landing point
            for _ in range(n_dwell):
                emit(current + rng.normal(0.0, policy.jitter_sd, 3))

    samples = [BrushSample(t=(i + 1) * dt, position=tuple(map(float, p)))
               for i, p in enumerate(positions)]
    for s in samples:
        session.feed_sample(s)
    log = session.finalize()
    trace = simulate_trace(arm, samples, r_base=r_base, alpha=alpha,
                           noise_sd=noise_sd, seed=sensor_seed)
    return log, trace, swaps


def _reach_check(models, arm: ArmModel, policy: SimPolicy):
    """Fail fast if any dot or hop waypoint sits outside the arm envelope."""
    margin = 6.0 * policy.jitter_sd
    shoulder = np.asarray(arm.shoulder)
    for model in models.values():
        hop_dir = _hop_direction(model.orientation)
        offsets = model.positions @ hop_dir
        hop_level = float(offsets.max()) + policy.hop_clearance
        lifted = model.positions + np.outer(hop_level - offsets, hop_dir)
        points = np.vstack([model.positions, lifted])
        d = np.linalg.norm(points - shoulder, axis=1)
        label = condition_label(model.orientation, model.configuration)
        if float(d.max()) + margin > arm.reach_max:
            raise ParameterError(
                f"{label} placement exceeds arm reach: needs "
                f"{float(d.max()) + margin:.3f} m, limit {arm.reach_max:.3f} m")
        if float(d.min()) - margin < arm.reach_min:
            raise ParameterError(
                f"{label} placement closer than minimum reach: "
                f"{float(d.min()) - margin:.3f} m, limit {arm.reach_min:.3f} m")


def _participant_ids(participants) -> list:
    if isinstance(participants, int):
        if participants < 2:
            raise ParameterError(f"need at least 2 participants, got {participants}")
        return [f"P{i + 1:02d}" for i in range(participants)]
    ids = list(participants)
    if len(ids) < 2 or len(set(ids)) != len(ids):
        raise ParameterError("participant ids must be unique, at least 2")
    return ids


def simulate_cohort(participants, policy: SimPolicy, out_dir,
                    model_params: ModelParams | None = None,
                    arm: ArmModel | None = None, r_base: float = 100.0,
                    alpha: float = 0.05, noise_sd: float = 0.1) -> dict:
    """Simulate a counterbalanced cohort; writes logs, traces, manifest."""
    policy.validate()
    params = model_params if model_params is not None else ModelParams()
    arm = arm if arm is not None else default_arm()
    ids = _participant_ids(participants)
    models = {condition_label(o, c): generate_model(c, o, params)
              for o, c in CONDITIONS}
    _reach_check(models, arm, policy)

    square = balanced_latin_square(len(CONDITIONS))
    assignment = assign_conditions(ids, square, CONDITION_LABELS)

    out_dir = os.fspath(out_dir)
    logs_dir = os.path.join(out_dir, "logs")
    traces_dir = os.path.join(out_dir, "traces")
    os.makedirs(logs_dir, exist_ok=True)
    os.makedirs(traces_dir, exist_ok=True)

    manifest = {
        "format": MANIFEST_FORMAT,
        "engine_version": ENGINE_VERSION,
        "seed": policy.seed,
        "policy": asdict(policy),
        "model_params": asdict(params),
        "arm": asdict(arm),
        "sensor": {"r_base": r_base, "alpha": alpha, "noise_sd": noise_sd},
        "conditions": list(CONDITION_LABELS),
        "square": [list(r) for r in square.rows],
        "participants": [],
    }
    for pi, pid in enumerate(ids):
        sessions = []
        for ci, label in enumerate(assignment[pid]):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=policy.seed, spawn_key=(pi, ci)))
            log, trace, swaps = simulate_session(
                models[label], pid, policy, rng, arm, r_base, alpha, noise_sd)
            log_rel = f"logs/{pid}_{label}.jsonl"
            trace_rel = f"traces/{pid}_{label}.csv"
            write_session_log(log, os.path.join(out_dir, log_rel))
            write_trace_csv(trace, os.path.join(out_dir, trace_rel))
            sessions.append({"condition": label, "log": log_rel,
                             "trace": trace_rel, "planned_out_of_order": swaps})
        manifest["participants"].append({"id": pid, "sessions": sessions})

    with open(os.path.join(out_dir, "manifest.json"), "w",
              encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def read_manifest(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read manifest: {exc}", path=str(path)) from exc
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"manifest is not valid JSON: {exc}",
                              path=str(path)) from exc
    if manifest.get("format") != MANIFEST_FORMAT:
        raise DataFormatError(
            f"unsupported manifest format {manifest.get('format')!r}",
            path=str(path))
    for key in ("participants", "conditions"):
        if key not in manifest:
            raise DataFormatError(f"manifest missing {key!r}", path=str(path))
    return manifest


@dataclass
class CohortAnalysis:
    records: list
    descriptives: dict    # (scope label, variable) -> Descriptives
    shapiro: dict         # (scope label, variable) -> ShapiroResult | error str
    anova: dict           # variable -> list[AnovaEffect] | error str
    contrasts: dict       # variable -> list of contrast row dicts
    paths: dict


def _fmt(x: float, places: int = 6) -> str:
    return f"{x:.{places}f}"


def _collect_records(manifest: dict, base_dir: str) -> list:
    records = []
    for part in manifest["participants"]:
        for sess in part["sessions"]:
            log_path = os.path.join(base_dir, sess["log"])
            trace_path = os.path.join(base_dir, sess["trace"])
            log = read_session_log(log_path)
            trace = read_trace_csv(trace_path)
            if not trace.samples:
                raise DataFormatError("trace holds no samples", path=trace_path)
            rec = build_record(log, trace)
            if rec.participant_id != part["id"]:
                raise DataFormatError(
                    f"log participant {rec.participant_id!r} does not match "
                    f"manifest entry {part['id']!r}", path=log_path)
            records.append(rec)
    return records


def _cell_tables(manifest: dict, records: list) -> dict:
    ids = [p["id"] for p in manifest["participants"]]
    by_key = {}
    for rec in records:
        key = (rec.participant_id, condition_label(
            Orientation(rec.orientation), Configuration(rec.configuration)))
        if key in by_key:
            raise DataFormatError(f"duplicate session for {key}")
        by_key[key] = rec
    tables = {}
    a_levels = (Orientation.VERTICAL.value, Orientation.HORIZONTAL.value)
    b_levels = (Configuration.FLAT.value, Configuration.CURVED.value)
    for var in VARIABLES:
        values = np.empty((len(ids), 2, 2))
        for i, pid in enumerate(ids):
            for ai, o in enumerate(a_levels):
                for bi, c in enumerate(b_levels):
                    key = (pid, f"{o}-{c}")
                    if key not in by_key:
                        raise DataFormatError(f"missing session for {key}")
                    values[i, ai, bi] = getattr(by_key[key], var)
        tables[var] = CellTable(values=values, a_levels=a_levels, b_levels=b_levels)
    return tables


def _contrast_pairs(table: CellTable):
    """Six paired contrasts: two pooled across the other factor, four simple."""
    v = table.values
    a0, a1 = table.a_levels
    b0, b1 = table.b_levels
    return [
        (f"{a1} - {a0} (pooled)", v[:, 1, :].ravel(), v[:, 0, :].ravel()),
        (f"{b1} - {b0} (pooled)", v[:, :, 1].ravel(), v[:, :, 0].ravel()),
        (f"{a1} - {a0} ({b0})", v[:, 1, 0], v[:, 0, 0]),
        (f"{a1} - {a0} ({b1})", v[:, 1, 1], v[:, 0, 1]),
        (f"{b1} - {b0} ({a0})", v[:, 0, 1], v[:, 0, 0]),
        (f"{b1} - {b0} ({a1})", v[:, 1, 1], v[:, 1, 0]),
    ]


def analyze_cohort(manifest_path, out_dir) -> CohortAnalysis:
    """Compute metrics and statistics for a simulated or recorded cohort.

    Degenerate cells (zero variance) are reported in the output tables
    instead of aborting the run. Outputs are byte-deterministic.
    """
    manifest = read_manifest(manifest_path)
    base_dir = os.path.dirname(os.path.abspath(os.fspath(manifest_path)))
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)

    records = _collect_records(manifest, base_dir)
    tables = _cell_tables(manifest, records)
    metrics_path = os.path.join(out_dir, "metrics.csv")
    write_metrics_csv(records, metrics_path)

    a_levels = tables[VARIABLES[0]].a_levels
    b_levels = tables[VARIABLES[0]].b_levels
    scopes = []
    for ai, a in enumerate(a_levels):
        scopes.append((a, lambda v, ai=ai: v[:, ai, :].ravel()))
        for bi, b in enumerate(b_levels):
            scopes.append((f"{a}:{b}", lambda v, ai=ai, bi=bi: v[:, ai, bi]))

    desc = {}
    desc_lines = ["condition," + ",".join(
        f"{var} mean (sd) [se]" for var in VARIABLES)]
    for scope, select in scopes:
        cells = [scope]
        for var in VARIABLES:
            d = descriptives(select(tables[var].values))
            desc[(scope, var)] = d
            cells.append(f"{_fmt(d.mean, 4)} ({_fmt(d.sd, 4)}) [{_fmt(d.se, 4)}]")
        desc_lines.append(",".join(cells))
    descriptives_path = os.path.join(out_dir, "descriptives.csv")
    _write_lines(descriptives_path, desc_lines)

    shapiro = {}
    shp_lines = ["variable,scope,n,W,p,note"]
    shapiro_scopes = [("all", lambda v: v.ravel())] + [
        (f"{a}:{b}", lambda v, ai=ai, bi=bi: v[:, ai, bi])
        for ai, a in enumerate(a_levels) for bi, b in enumerate(b_levels)]
    for var in VARIABLES:
        for scope, select in shapiro_scopes:
            x = select(tables[var].values)
            try:
                res = shapiro_wilk(x)
                shapiro[(scope, var)] = res
                shp_lines.append(
                    f"{var},{scope},{res.n},{_fmt(res.w)},{_fmt(res.p)},")
            except (DegenerateDataError, ParameterError) as exc:
                # constant data or too few sessions: report, keep going
                shapiro[(scope, var)] = str(exc)
                shp_lines.append(f"{var},{scope},{len(x)},,,{exc}")
    shapiro_path = os.path.join(out_dir, "shapiro.csv")
    _write_lines(shapiro_path, shp_lines)

    anova = {}
    an_lines = ["variable,effect,df1,df2,F,p,significant,eta2,magnitude,note"]
    for var in VARIABLES:
        try:
            effects = rm_anova_2x2(tables[var])
            anova[var] = effects
            for eff in effects:
                star = "*" if eff.p < 0.05 else ""
                an_lines.append(
                    f"{var},{eff.name},{eff.df1},{eff.df2},{_fmt(eff.f)},"
                    f"{_fmt(eff.p)},{star},{_fmt(eff.eta2)},{eta2_label(eff.eta2)},")
        except DegenerateDataError as exc:
            anova[var] = str(exc)
            an_lines.append(f"{var},,,,,,,,,{exc}")
    anova_path = os.path.join(out_dir, "anova.csv")
    _write_lines(anova_path, an_lines)

    contrasts = {}
    ct_lines = ["variable,contrast,mean_diff,t,df,p,p_bonferroni,note"]
    for var in VARIABLES:
        rows = []
        pairs = _contrast_pairs(tables[var])
        results = []
        for name, x, y in pairs:
            try:
                res = paired_t(x, y)
                results.append((name, float(np.mean(x - y)), res, None))
            except DegenerateDataError as exc:
                results.append((name, float(np.mean(x - y)), None, str(exc)))
        valid_ps = [r.p for _, _, r, _ in results if r is not None]
        adjusted = iter(bonferroni(valid_ps, k=len(pairs)))
        for name, diff, res, note in results:
            if res is None:
                rows.append({"contrast": name, "mean_diff": diff, "t": None,
                             "df": None, "p": None, "p_bonferroni": None,
                             "note": note})
                ct_lines.append(f"{var},{name},{_fmt(diff)},,,,,{note}")
            else:
                p_adj = next(adjusted)
                rows.append({"contrast": name, "mean_diff": diff, "t": res.t,
                             "df": res.df, "p": res.p, "p_bonferroni": p_adj,
                             "note": None})
                ct_lines.append(
                    f"{var},{name},{_fmt(diff)},{_fmt(res.t, 4)},{res.df},"
                    f"{_fmt(res.p)},{_fmt(p_adj)},")
        contrasts[var] = rows
    contrasts_path = os.path.join(out_dir, "contrasts.csv")
    _write_lines(contrasts_path, ct_lines)

    return CohortAnalysis(
        records=records, descriptives=desc, shapiro=shapiro, anova=anova,
        contrasts=contrasts,
        paths={"metrics": metrics_path, "descriptives": descriptives_path,
               "shapiro": shapiro_path, "anova": anova_path,
               "contrasts": contrasts_path})


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

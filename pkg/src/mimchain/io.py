"""File formats: track and contour CSVs, map/noise JSON specs, reports, SVG.

Writers emit floats with 17 significant digits so a write/read cycle
round-trips values exactly. Readers validate as they parse and report the
offending line number or utterance id. Report JSON is emitted with sorted
keys so identical analyses produce byte-identical files.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .analysis import (
    DensityEstimate,
    TransferEstimate,
    VALLEY_DEPTH_DEFINITION,
    HypothesisVerdict,
    ValleyReport,
)
from .chain import VariationModel
from .contour import Contour, ContourEnsemble, RawTrack
from .response_maps import (
    AttractorSpec,
    CompressiveAttractor,
    InverterTransfer,
    Quantizer,
    ResponseMap,
    Transpose,
)
from .stimulus import BasisSet

__all__ = [
    "read_tracks",
    "write_tracks",
    "read_ensembles",
    "read_ensemble",
    "read_basis",
    "write_ensemble",
    "map_from_dict",
    "map_to_dict",
    "load_map",
    "save_map",
    "load_variation",
    "save_variation",
    "write_density_csv",
    "write_sweep_csv",
    "report_to_json",
    "write_report",
    "write_svg_lines",
]

TRACK_HEADER = ["utterance_id", "time_s", "f0_hz"]
CONTOUR_HEADER = ["utterance_id", "iter", "tau", "phi"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_float(text: str, line_no: int, column: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ValueError(f"line {line_no}: {column} is not a number: {text!r}") from None
    if not np.isfinite(v):
        raise ValueError(f"line {line_no}: {column} must be finite, got {text!r}")
    return v


def _check_header(row, expected, path):
    if row != expected:
        raise ValueError(f"{path}: expected header {','.join(expected)}, got {row}")


def read_tracks(path) -> list:
    """Read raw f0 tracks grouped by utterance_id, in file order."""
    path = Path(path)
    order, samples = [], {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), TRACK_HEADER, path)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"line {line_no}: expected 3 fields, got {len(row)}")
            uid = row[0]
            t = _parse_float(row[1], line_no, "time_s")
            f = _parse_float(row[2], line_no, "f0_hz")
            if uid not in samples:
                order.append(uid)
                samples[uid] = ([], [])
            samples[uid][0].append(t)
            samples[uid][1].append(f)
    tracks = []
    for uid in order:
        times, f0 = samples[uid]
        try:
            tracks.append(RawTrack(uid, np.array(times), np.array(f0)))
        except ValueError as exc:
            raise ValueError(f"utterance {uid!r}: {exc}") from None
    if not tracks:
        raise ValueError(f"{path}: no samples")
    return tracks


def write_tracks(path, tracks) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACK_HEADER)
        for tr in tracks:
            for t, f in zip(tr.times, tr.f0):
                writer.writerow([tr.utterance_id, _fmt(t), _fmt(f)])


def read_ensembles(path) -> list:
    """Read contour CSV grouped into ensembles by iteration, ascending."""
    path = Path(path)
    data = {}  # iteration -> utterance_id -> ([tau], [phi])
    order = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), CONTOUR_HEADER, path)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"line {line_no}: expected 4 fields, got {len(row)}")
            uid = row[0]
            try:
                iteration = int(row[1])
            except ValueError:
                raise ValueError(f"line {line_no}: iter is not an integer: {row[1]!r}") from None
            tau = _parse_float(row[2], line_no, "tau")
            phi = _parse_float(row[3], line_no, "phi")
            per_iter = data.setdefault(iteration, {})
            if uid not in per_iter:
                order.setdefault(iteration, []).append(uid)
                per_iter[uid] = ([], [])
            per_iter[uid][0].append(tau)
            per_iter[uid][1].append(phi)
    if not data:
        raise ValueError(f"{path}: no contour rows")
    ensembles = []
    for iteration in sorted(data):
        contours = []
        for uid in order[iteration]:
            tau, phi = data[iteration][uid]
            try:
                contours.append(Contour(uid, np.array(tau), np.array(phi)))
            except ValueError as exc:
                raise ValueError(f"utterance {uid!r}: {exc}") from None
        ensembles.append(ContourEnsemble(iteration=iteration, contours=tuple(contours)))
    return ensembles


def read_ensemble(path) -> ContourEnsemble:
    """Read a contour CSV that must hold exactly one iteration."""
    ensembles = read_ensembles(path)
    if len(ensembles) != 1:
        raise ValueError(f"{path}: expected one iteration, found {len(ensembles)}")
    return ensembles[0]


def read_basis(path) -> BasisSet:
    """Read a basis file: one iteration with exactly three utterances."""
    ens = read_ensemble(path)
    if len(ens) != 3:
        raise ValueError(f"{path}: a basis file needs exactly 3 utterances, found {len(ens)}")
    return BasisSet(ens.contours)


def write_ensemble(path, ensemble: ContourEnsemble) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CONTOUR_HEADER)
        for c in ensemble.contours:
            for tau, phi in zip(c.grid, c.values):
                writer.writerow([c.utterance_id, ensemble.iteration, _fmt(tau), _fmt(phi)])


def _require_keys(obj: dict, required, optional=(), what="object"):
    keys = set(obj)
    missing = set(required) - keys
    unknown = keys - set(required) - set(optional)
    if missing:
        raise ValueError(f"{what}: missing fields {sorted(missing)}")
    if unknown:
        raise ValueError(f"{what}: unknown fields {sorted(unknown)}")


def _attractors_from_list(items) -> AttractorSpec:
    labels, phi = [], []
    for entry in items:
        _require_keys(entry, ("label", "phi"), what="attractor entry")
        labels.append(str(entry["label"]))
        phi.append(float(entry["phi"]))
    return AttractorSpec(tuple(labels), np.array(phi))


def map_from_dict(obj: dict) -> ResponseMap:
    """Build a response map from its JSON object form; unknown fields rejected."""
    if "type" not in obj:
        raise ValueError("map spec: missing 'type'")
    kind = obj["type"]
    if kind == "transpose":
        _require_keys(obj, ("type", "offset"), what="transpose spec")
        return Transpose(offset=float(obj["offset"]))
    if kind == "quantizer":
        _require_keys(obj, ("type", "attractors"), what="quantizer spec")
        return Quantizer(attractors=_attractors_from_list(obj["attractors"]))
    if kind == "compressive":
        _require_keys(
            obj, ("type", "attractors", "lambda"), optional=("assignment",), what="compressive spec"
        )
        return CompressiveAttractor(
            attractors=_attractors_from_list(obj["attractors"]),
            pull=float(obj["lambda"]),
            assignment=str(obj.get("assignment", "utterance")),
        )
    if kind == "inverter":
        _require_keys(obj, ("type",), optional=("v_lo", "v_hi", "v_mid", "gain"), what="inverter spec")
        defaults = InverterTransfer()
        return InverterTransfer(
            v_lo=float(obj.get("v_lo", defaults.v_lo)),
            v_hi=float(obj.get("v_hi", defaults.v_hi)),
            v_mid=float(obj.get("v_mid", defaults.v_mid)),
            gain=float(obj.get("gain", defaults.gain)),
        )
    raise ValueError(f"map spec: unknown type {kind!r}")


def map_to_dict(m: ResponseMap) -> dict:
    if isinstance(m, Transpose):
        return {"type": "transpose", "offset": m.offset}
    if isinstance(m, Quantizer):
        return {
            "type": "quantizer",
            "attractors": [
                {"label": s, "phi": float(p)} for s, p in zip(m.attractors.labels, m.attractors.phi)
            ],
        }
    if isinstance(m, CompressiveAttractor):
        return {
            "type": "compressive",
            "attractors": [
                {"label": s, "phi": float(p)} for s, p in zip(m.attractors.labels, m.attractors.phi)
            ],
            "lambda": m.pull,
            "assignment": m.assignment,
        }
    if isinstance(m, InverterTransfer):
        return {"type": "inverter", "v_lo": m.v_lo, "v_hi": m.v_hi, "v_mid": m.v_mid, "gain": m.gain}
    raise TypeError(f"unknown response map {type(m).__name__}")


def load_map(path) -> ResponseMap:
    with Path(path).open(encoding="utf-8") as fh:
        return map_from_dict(json.load(fh))


def save_map(path, m: ResponseMap) -> None:
    Path(path).write_text(json.dumps(map_to_dict(m), indent=2, sort_keys=True) + "\n", "utf-8")


_VARIATION_FIELDS = ("transposition_sd", "jitter_sd", "smooth_halfwidth", "seed")


def load_variation(path) -> VariationModel:
    """Read a noise spec JSON; missing fields take defaults, unknown are rejected."""
    with Path(path).open(encoding="utf-8") as fh:
        obj = json.load(fh)
    _require_keys(obj, (), optional=_VARIATION_FIELDS, what="noise spec")
    defaults = VariationModel()
    return VariationModel(
        transposition_sd=float(obj.get("transposition_sd", defaults.transposition_sd)),
        jitter_sd=float(obj.get("jitter_sd", defaults.jitter_sd)),
        smooth_halfwidth=int(obj.get("smooth_halfwidth", defaults.smooth_halfwidth)),
        seed=int(obj.get("seed", defaults.seed)),
    )


def save_variation(path, v: VariationModel) -> None:
    obj = {
        "transposition_sd": v.transposition_sd,
        "jitter_sd": v.jitter_sd,
        "smooth_halfwidth": v.smooth_halfwidth,
        "seed": v.seed,
    }
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", "utf-8")


def write_density_csv(path, estimate: DensityEstimate) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phi", "density"])
        for phi, dens in zip(estimate.grid, estimate.density):
            writer.writerow([_fmt(phi), _fmt(dens)])


def write_sweep_csv(path, table: np.ndarray) -> None:
    """Long-format inverter sweep: one row per (input, stage) voltage."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["v_in", "stage", "v"])
        for row in table:
            v_in = row[0]
            for stage, v in enumerate(row):
                writer.writerow([_fmt(v_in), stage, _fmt(v)])


def _valley_obj(valley: ValleyReport) -> dict:
    return {
        "definition": VALLEY_DEPTH_DEFINITION,
        "per_iteration": [
            {"iteration": it, "depth": depth, "peaks": list(peaks)}
            for it, depth, peaks in valley.per_iteration
        ],
    }


def _transfer_obj(transfer: TransferEstimate) -> dict:
    return {
        "bins": [
            {"x_center": b.x_center, "y_mean": b.y_mean, "y_sd": b.y_sd, "count": b.count}
            for b in transfer.bins
        ],
        "fitted": {
            "a_lo": transfer.fitted.a_lo,
            "a_hi": transfer.fitted.a_hi,
            "lambda": transfer.fitted.lam,
            "rmse": transfer.fitted.rmse,
        },
    }


def report_to_json(
    window,
    verdict: HypothesisVerdict,
    transfer: TransferEstimate,
) -> str:
    """Serialize one analysis into deterministic JSON text."""
    obj = {
        "schema": "mimchain-report/1",
        "window": [float(window[0]), float(window[1])],
        "valley": _valley_obj(verdict.valley),
        "transfer": _transfer_obj(transfer),
        "contraction_rate": verdict.contraction,
        "verdict": verdict.verdict,
        "thresholds": verdict.thresholds,
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_report(path, window, verdict, transfer) -> None:
    Path(path).write_text(report_to_json(window, verdict, transfer), "utf-8")


def write_svg_lines(path, series, width=640, height=400, x_label="", y_label="") -> None:
    """Minimal SVG line plot: ``series`` is a list of (xs, ys) polylines."""
    xs_all = np.concatenate([np.asarray(xs, dtype=float) for xs, _ in series])
    ys_all = np.concatenate([np.asarray(ys, dtype=float) for _, ys in series])
    x0, x1 = float(xs_all.min()), float(xs_all.max())
    y0, y1 = float(ys_all.min()), float(ys_all.max())
    x_span = (x1 - x0) or 1.0
    y_span = (y1 - y0) or 1.0
    pad = 40
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]

    def sx(x):
        return pad + (x - x0) / x_span * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / y_span * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="#999"/>',
    ]
    for i, (xs, ys) in enumerate(series):
        pts = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{colors[i % len(colors)]}" '
            'stroke-width="1.2"/>'
        )
    if x_label:
        parts.append(
            f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" '
            f'font-size="12">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 14 {height / 2:.0f})">{y_label}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", "utf-8")

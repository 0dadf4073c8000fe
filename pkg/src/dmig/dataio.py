"""Text file formats for datasets, reports, series and truth sidecars.

All files start with a `#format v1` line followed by a `#kind` line.
Numbers are serialized with repr, which round-trips 64-bit floats
exactly; infinities appear as the literal tokens `+inf` / `-inf` and NaN
as `nan` (reports only - dataset bodies must be finite).

Dataset files are CSV with a header declaring each column as `z<k>`
(latent dimension k, 1-based) or `a<name>:<kind>` with kind `cont` or
`disc`. Optional `#map a<name> -> z<k>` lines before the header override
the default identity assignment of attributes to latent dimensions.

Report files are line-oriented key/value text; series files hold one
report block per epoch between `epoch <t>` and `end` lines, with epochs
strictly increasing. Truth sidecars carry the closed-form quantities of
a synthetic family.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np

from .errors import DmigError, FileFormatError
from .estimation import CONTINUOUS, DISCRETE, EstimatorConfig, SampleColumn
from .metrics import AttributeMetrics, Dataset, MetricReport
from .synthetic import GroundTruth

__all__ = [
    "read_dataset",
    "write_dataset",
    "read_report",
    "write_report",
    "read_series",
    "write_series",
    "read_truth",
    "write_truth",
    "format_float",
    "parse_float",
]

FORMAT_LINE = "#format v1"

_KIND_TO_TOKEN = {CONTINUOUS: "cont", DISCRETE: "disc"}
_TOKEN_TO_KIND = {"cont": CONTINUOUS, "disc": DISCRETE}

_Z_TOKEN = re.compile(r"^z([1-9][0-9]*)$")
_MAP_LINE = re.compile(r"^#map a(.+) -> z([1-9][0-9]*)$")


def format_float(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return repr(float(v))


def parse_float(token: str, where: str) -> float:
    if token == "+inf":
        return math.inf
    if token == "-inf":
        return -math.inf
    if token == "nan":
        return math.nan
    try:
        v = float(token)
    except ValueError:
        raise FileFormatError(f"{where}: not a number: {token!r}") from None
    if not math.isfinite(v):
        # float() accepts spellings like 'inf'/'Infinity'; only the
        # canonical tokens above may carry non-finite values.
        raise FileFormatError(f"{where}: non-finite literal {token!r}")
    return v


def _check_name(name: str, where: str) -> str:
    if not name or any(c in name for c in " \t,=") or name != name.strip():
        raise FileFormatError(f"{where}: unusable attribute name {name!r}")
    return name


def _read_lines(path: Path) -> list[str]:
    text = path.read_text(encoding="utf-8")
    return text.splitlines()


def _check_header(lines: list[str], path: Path, kind: str | None) -> int:
    """Validate the format (and optional kind) lines; return body start."""
    if not lines or lines[0] != FORMAT_LINE:
        raise FileFormatError(f"{path}:1: expected leading '{FORMAT_LINE}' line")
    idx = 1
    if idx < len(lines) and lines[idx].startswith("#kind "):
        found = lines[idx][len("#kind "):]
        if kind is not None and found != kind:
            raise FileFormatError(
                f"{path}:2: expected '#kind {kind}', found '#kind {found}'"
            )
        idx += 1
    elif kind is not None and kind != "dataset":
        # Dataset files may omit the kind line (the CSV header is
        # self-identifying); report/series/truth files may not.
        raise FileFormatError(f"{path}:2: expected '#kind {kind}' line")
    return idx


# ---------------------------------------------------------------------------
# Dataset files


def write_dataset(ds: Dataset, path: str | Path) -> None:
    path = Path(path)
    for name in ds.names:
        _check_name(name, str(path))
    lines = [FORMAT_LINE, "#kind dataset"]
    for i, name in enumerate(ds.names):
        lines.append(f"#map a{name} -> z{ds.regularized_map[i] + 1}")
    header = [f"z{j + 1}" for j in range(ds.d)]
    header += [
        f"a{name}:{_KIND_TO_TOKEN[col.kind]}"
        for name, col in zip(ds.names, ds.attributes)
    ]
    lines.append(",".join(header))
    lat = ds.latents
    attr_vals = [col.values for col in ds.attributes]
    for r in range(ds.n):
        row = [format_float(lat[r, j]) for j in range(ds.d)]
        row += [format_float(vals[r]) for vals in attr_vals]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    lines = _read_lines(path)
    idx = _check_header(lines, path, "dataset")

    mapping: dict[str, int] = {}
    while idx < len(lines) and lines[idx].startswith("#"):
        m = _MAP_LINE.match(lines[idx])
        if not m:
            raise FileFormatError(f"{path}:{idx + 1}: malformed map line {lines[idx]!r}")
        name, z = m.group(1), int(m.group(2))
        if name in mapping:
            raise FileFormatError(f"{path}:{idx + 1}: duplicate map for a{name}")
        mapping[name] = z - 1
        idx += 1
    if idx >= len(lines):
        raise FileFormatError(f"{path}: missing header row")

    header_lineno = idx + 1
    tokens = lines[idx].split(",")
    z_cols: dict[int, int] = {}
    attr_cols: list[tuple[str, str, int]] = []
    for c, tok in enumerate(tokens):
        zm = _Z_TOKEN.match(tok)
        if zm:
            k = int(zm.group(1))
            if k in z_cols:
                raise FileFormatError(f"{path}:{header_lineno}: duplicate column z{k}")
            z_cols[k] = c
        elif tok.startswith("a") and ":" in tok:
            name, _, kind_tok = tok[1:].rpartition(":")
            _check_name(name, f"{path}:{header_lineno}")
            if kind_tok not in _TOKEN_TO_KIND:
                raise FileFormatError(
                    f"{path}:{header_lineno}: unknown kind {kind_tok!r} in {tok!r}"
                )
            attr_cols.append((name, _TOKEN_TO_KIND[kind_tok], c))
        else:
            raise FileFormatError(
                f"{path}:{header_lineno}: malformed column declaration {tok!r}"
            )
    d = len(z_cols)
    if d == 0:
        raise FileFormatError(f"{path}:{header_lineno}: no latent columns declared")
    if sorted(z_cols) != list(range(1, d + 1)):
        raise FileFormatError(
            f"{path}:{header_lineno}: latent columns must be exactly z1..z{d}"
        )
    names = [name for name, _, _ in attr_cols]
    if len(set(names)) != len(names):
        raise FileFormatError(f"{path}:{header_lineno}: duplicate attribute names")

    body: list[list[float]] = []
    width = len(tokens)
    for lineno, line in enumerate(lines[idx + 1:], start=header_lineno + 1):
        cells = line.split(",")
        if len(cells) != width:
            raise FileFormatError(
                f"{path}:{lineno}: expected {width} cells, found {len(cells)}"
            )
        row = []
        for tok in cells:
            v = parse_float(tok, f"{path}:{lineno}")
            if not math.isfinite(v):
                raise FileFormatError(f"{path}:{lineno}: non-finite value {tok!r}")
            row.append(v)
        body.append(row)

    for name in mapping:
        if name not in names:
            raise FileFormatError(f"{path}: map references unknown attribute a{name}")
    reg = tuple(
        mapping.get(name, i) for i, name in enumerate(names)
    )

    table = np.array(body, dtype=np.float64).reshape(len(body), width)
    try:
        latents = table[:, [z_cols[k] for k in range(1, d + 1)]]
        attributes = tuple(
            SampleColumn(table[:, c], kind=kind) for _, kind, c in attr_cols
        )
        return Dataset(
            latents=latents,
            attributes=attributes,
            regularized_map=reg,
            names=tuple(names),
        )
    except DmigError as exc:
        raise FileFormatError(f"{path}: invalid dataset: {exc}") from exc


# ---------------------------------------------------------------------------
# Report files


def _dim_token(j: int | None) -> str:
    return "none" if j is None else f"z{j + 1}"


def _parse_dim(tok: str, where: str) -> int | None:
    if tok == "none":
        return None
    m = _Z_TOKEN.match(tok)
    if not m:
        raise FileFormatError(f"{where}: bad dimension token {tok!r}")
    return int(m.group(1)) - 1


def _report_body(report: MetricReport) -> list[str]:
    cfg = report.config_echo
    lines = [
        f"digest {report.dataset_digest}",
        f"config k={cfg.k} jitter={format_float(cfg.jitter)} seed={cfg.seed} unit={cfg.unit}",
        f"mean_mig {format_float(report.mean_mig)}",
        f"mean_dmig {format_float(report.mean_dmig)}",
    ]
    for a in report.per_attribute:
        name = a.name if a.name is not None else "?"
        _check_name(name, "report")
        flags = ",".join(sorted(a.flags)) if a.flags else "-"
        scc = "none" if a.scc is None else format_float(a.scc)
        lines.append(
            f"attribute {name} mig={format_float(a.mig)} dmig={format_float(a.dmig)} "
            f"scc={scc} top_dim={_dim_token(a.top_dim)} "
            f"runner_up_dim={_dim_token(a.runner_up_dim)} branch={a.branch} "
            f"denominator={format_float(a.denominator)} flags={flags}"
        )
    return lines


def _parse_report_body(lines: list[str], path: Path, start_lineno: int) -> MetricReport:
    digest = None
    cfg = None
    mean_mig = None
    mean_dmig = None
    per: list[AttributeMetrics] = []
    for off, line in enumerate(lines):
        where = f"{path}:{start_lineno + off}"
        key, _, rest = line.partition(" ")
        if key == "digest":
            digest = rest
        elif key == "config":
            kv = dict(item.split("=", 1) for item in rest.split(" "))
            try:
                cfg = EstimatorConfig(
                    k=int(kv["k"]),
                    jitter=parse_float(kv["jitter"], where),
                    seed=int(kv["seed"]),
                    unit=kv["unit"],
                )
            except (KeyError, ValueError) as exc:
                raise FileFormatError(f"{where}: bad config line: {exc}") from exc
        elif key == "mean_mig":
            mean_mig = parse_float(rest, where)
        elif key == "mean_dmig":
            mean_dmig = parse_float(rest, where)
        elif key == "attribute":
            name, _, kvs = rest.partition(" ")
            kv = dict(item.split("=", 1) for item in kvs.split(" "))
            try:
                flags_tok = kv["flags"]
                per.append(
                    AttributeMetrics(
                        name=name,
                        mig=parse_float(kv["mig"], where),
                        dmig=parse_float(kv["dmig"], where),
                        scc=None if kv["scc"] == "none" else parse_float(kv["scc"], where),
                        top_dim=_parse_dim(kv["top_dim"], where),
                        runner_up_dim=_parse_dim(kv["runner_up_dim"], where),
                        branch=kv["branch"],
                        denominator=parse_float(kv["denominator"], where),
                        flags=frozenset() if flags_tok == "-" else frozenset(flags_tok.split(",")),
                    )
                )
            except KeyError as exc:
                raise FileFormatError(f"{where}: attribute line missing {exc}") from exc
        else:
            raise FileFormatError(f"{where}: unknown report line {line!r}")
    if digest is None or cfg is None or mean_mig is None or mean_dmig is None or not per:
        raise FileFormatError(f"{path}: incomplete report block")
    return MetricReport(
        per_attribute=tuple(per),
        mean_mig=mean_mig,
        mean_dmig=mean_dmig,
        config_echo=cfg,
        dataset_digest=digest,
    )


def write_report(report: MetricReport, path: str | Path) -> None:
    path = Path(path)
    lines = [FORMAT_LINE, "#kind report"] + _report_body(report)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_report(path: str | Path) -> MetricReport:
    path = Path(path)
    lines = _read_lines(path)
    idx = _check_header(lines, path, "report")
    return _parse_report_body(lines[idx:], path, idx + 1)


# ---------------------------------------------------------------------------
# Series files


def write_series(series: list[tuple[int, MetricReport]], path: str | Path) -> None:
    path = Path(path)
    epochs = [t for t, _ in series]
    if any(b <= a for a, b in zip(epochs, epochs[1:])):
        raise FileFormatError(f"{path}: epochs must be strictly increasing")
    lines = [FORMAT_LINE, "#kind series"]
    for t, report in series:
        lines.append(f"epoch {t}")
        lines.extend(_report_body(report))
        lines.append("end")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_series(path: str | Path) -> list[tuple[int, MetricReport]]:
    path = Path(path)
    lines = _read_lines(path)
    idx = _check_header(lines, path, "series")
    series: list[tuple[int, MetricReport]] = []
    i = idx
    while i < len(lines):
        where = f"{path}:{i + 1}"
        if not lines[i].startswith("epoch "):
            raise FileFormatError(f"{where}: expected 'epoch <t>' line, got {lines[i]!r}")
        try:
            t = int(lines[i][len("epoch "):])
        except ValueError:
            raise FileFormatError(f"{where}: bad epoch index") from None
        j = i + 1
        while j < len(lines) and lines[j] != "end":
            j += 1
        if j >= len(lines):
            raise FileFormatError(f"{path}: epoch {t} block missing 'end' line")
        series.append((t, _parse_report_body(lines[i + 1:j], path, i + 2)))
        i = j + 1
    if not series:
        raise FileFormatError(f"{path}: series contains no epochs")
    epochs = [t for t, _ in series]
    if any(b <= a for a, b in zip(epochs, epochs[1:])):
        raise FileFormatError(f"{path}: epochs must be strictly increasing")
    return series


# ---------------------------------------------------------------------------
# Ground-truth sidecars


def write_truth(family: str, truth: GroundTruth, path: str | Path) -> None:
    path = Path(path)
    lines = [
        FORMAT_LINE,
        "#kind truth",
        f"family {family}",
        f"h_a1 {format_float(truth.h_a[0])}",
        f"h_a2 {format_float(truth.h_a[1])}",
        f"i_a1a2 {format_float(truth.i_a1a2)}",
        f"h_cond12 {format_float(truth.h_cond[0][1])}",
        f"h_cond21 {format_float(truth.h_cond[1][0])}",
        f"ideal_dmig1 {format_float(truth.ideal_dmig[0])}",
        f"ideal_dmig2 {format_float(truth.ideal_dmig[1])}",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_truth(path: str | Path) -> tuple[str, GroundTruth]:
    path = Path(path)
    lines = _read_lines(path)
    idx = _check_header(lines, path, "truth")
    kv: dict[str, str] = {}
    for off, line in enumerate(lines[idx:]):
        key, _, rest = line.partition(" ")
        if not rest:
            raise FileFormatError(f"{path}:{idx + off + 1}: malformed line {line!r}")
        kv[key] = rest
    try:
        family = kv["family"]
        where = str(path)
        truth = GroundTruth(
            h_a=(parse_float(kv["h_a1"], where), parse_float(kv["h_a2"], where)),
            i_a1a2=parse_float(kv["i_a1a2"], where),
            h_cond=(
                (0.0, parse_float(kv["h_cond12"], where)),
                (parse_float(kv["h_cond21"], where), 0.0),
            ),
            ideal_dmig=(
                parse_float(kv["ideal_dmig1"], where),
                parse_float(kv["ideal_dmig2"], where),
            ),
        )
    except KeyError as exc:
        raise FileFormatError(f"{path}: truth sidecar missing {exc}") from exc
    return family, truth

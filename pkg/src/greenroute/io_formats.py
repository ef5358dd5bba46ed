"""Parsers and writers: native graph text, a topology reader for files in
the SNDLib native layout, CSV reports, and a mini LP-file reader used to
round-trip the repo's own exports.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields
from fractions import Fraction

from .bounds import BoundReport
from .graph import UNBOUNDED, DemandSet, Network
from .heuristics import SweepReport, SweepRow
from .metrics import MetricsRow


class GraphParseError(ValueError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _capacity_token(value) -> str:
    if value is UNBOUNDED:
        return "INF"
    f = Fraction(value)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _parse_capacity(token, line_no):
    if token == "INF":
        return UNBOUNDED
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise GraphParseError(line_no, f"bad capacity {token!r}") from None


def write_graph_text(network: Network, demands: DemandSet = None) -> str:
    """Canonical text form: sorted records, single spaces, newline line ends.

    Capacities and volumes are exact fractions "p/q" (or INF), so a parse and
    re-write is byte-identical.
    """
    out = [f"NODES {network.node_count}"]
    out.extend(str(v) for v in range(network.node_count))
    rows = sorted(
        (min(e.u, e.v), max(e.u, e.v), _capacity_token(e.capacity))
        for e in network.edges
    )
    out.append(f"EDGES {len(rows)}")
    out.extend(f"{u} {v} {cap}" for u, v, cap in rows)
    dem_rows = []
    if demands is not None:
        dem_rows = sorted((d.s, d.t, _capacity_token(d.volume)) for d in demands)
    out.append(f"DEMANDS {len(dem_rows)}")
    out.extend(f"{s} {t} {vol}" for s, t, vol in dem_rows)
    return "\n".join(out) + "\n"


def parse_graph_text(text: str):
    """Parse the native format back into (Network, DemandSet)."""
    records = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            records.append((line_no, line.split()))
    pos = 0

    def take(section):
        nonlocal pos
        if pos >= len(records):
            raise GraphParseError(
                records[-1][0] if records else 1, f"missing {section} section"
            )
        line_no, tokens = records[pos]
        if tokens[0] != section or len(tokens) != 2:
            raise GraphParseError(line_no, f"expected '{section} <count>'")
        try:
            count = int(tokens[1])
        except ValueError:
            raise GraphParseError(line_no, f"bad {section} count") from None
        pos += 1
        rows = []
        for _ in range(count):
            if pos >= len(records):
                raise GraphParseError(
                    records[-1][0], f"{section} section ends early"
                )
            rows.append(records[pos])
            pos += 1
        return rows

    node_rows = take("NODES")
    node_ids = []
    for line_no, tokens in node_rows:
        try:
            node_ids.append(int(tokens[0]))
        except ValueError:
            raise GraphParseError(line_no, f"bad node id {tokens[0]!r}") from None
    n = len(node_ids)
    if sorted(node_ids) != list(range(n)):
        raise GraphParseError(node_rows[0][0] if node_rows else 1,
                              "node ids must be 0..n-1")
    edge_rows = take("EDGES")
    edges = []
    for line_no, tokens in edge_rows:
        if len(tokens) != 3:
            raise GraphParseError(line_no, "edge record needs 'u v capacity'")
        u, v = int(tokens[0]), int(tokens[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(line_no, f"edge endpoint {u},{v} unknown")
        edges.append((u, v, _parse_capacity(tokens[2], line_no)))
    demand_rows = take("DEMANDS")
    dems = []
    for line_no, tokens in demand_rows:
        if len(tokens) != 3:
            raise GraphParseError(line_no, "demand record needs 's t volume'")
        s, t = int(tokens[0]), int(tokens[1])
        if not (0 <= s < n and 0 <= t < n):
            raise GraphParseError(line_no, f"demand endpoint {s},{t} unknown")
        vol = _parse_capacity(tokens[2], line_no)
        if vol is UNBOUNDED:
            raise GraphParseError(line_no, "demand volume cannot be INF")
        dems.append((s, t, vol))
    if pos != len(records):
        raise GraphParseError(records[pos][0], "trailing content")
    try:
        network = Network.from_edge_list(n, edges)
        demands = DemandSet.from_tuples(dems)
    except ValueError as exc:
        raise GraphParseError(edge_rows[0][0] if edge_rows else 1, str(exc))
    return network, demands


# ---------------------------------------------------------------------------
# SNDLib native topology subset


def parse_sndlib(text: str) -> Network:
    """Nodes and links from a file in SNDLib native layout.

    Node ids become dense integers in order of first appearance; original
    names are kept as labels.  Coordinates, capacities, costs, and the
    DEMANDS section are ignored: experiments apply a uniform capacity later.
    Parallel links are rejected because the model has one capacity per pair.
    """
    lines = text.splitlines()
    section = None
    names: list[str] = []
    index: dict[str, int] = {}
    links = []
    have_nodes = have_links = False
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("?"):
            continue
        upper = line.split()[0].upper()
        if upper in ("NODES", "LINKS", "DEMANDS", "ADMISSIBLEPATHS") and \
                "(" in line:
            section = upper
            have_nodes |= upper == "NODES"
            have_links |= upper == "LINKS"
            continue
        if line == ")":
            section = None
            continue
        if section == "NODES":
            name = line.split()[0]
            if name in index:
                raise GraphParseError(line_no, f"duplicate node {name!r}")
            index[name] = len(names)
            names.append(name)
        elif section == "LINKS":
            tokens = line.replace("(", " ").replace(")", " ").split()
            if len(tokens) < 3:
                raise GraphParseError(line_no, "link record needs endpoints")
            a, b = tokens[1], tokens[2]
            if a not in index or b not in index:
                raise GraphParseError(line_no, f"unknown endpoint in {a}-{b}")
            links.append((index[a], index[b]))
    if not have_nodes:
        raise GraphParseError(1, "missing NODES section")
    if not have_links:
        raise GraphParseError(1, "missing LINKS section")
    try:
        return Network.from_edge_list(
            len(names), [(u, v, 0) for u, v in links], node_labels=names
        )
    except ValueError as exc:
        raise GraphParseError(1, str(exc))


# ---------------------------------------------------------------------------
# CSV reports


def _csv_cell(value):
    """(decimal text, exact text) for rationals; plain text otherwise."""
    if isinstance(value, Fraction):
        decimal = f"{float(value):.6f}".rstrip("0").rstrip(".")
        if decimal in ("", "-"):
            decimal = "0"
        return decimal, _capacity_token(value)
    return value, None


_RATIONAL_COLUMNS = {"lam", "spared_pct", "stretch", "avg_disjoint_paths",
                     "value", "avg_route_length", "overprovisioning",
                     "energy_mwh_per_year"}


def write_csv_report(report) -> str:
    """Sweep, bounds, or metrics rows as CSV (RFC 4180 quoting, newline
    terminated, '.' decimals).  Every rational column gets a sibling
    *_exact column carrying the value as an exact fraction.
    """
    if isinstance(report, SweepReport):
        rows = list(report.rows)
        row_type = SweepRow
    elif isinstance(report, (list, tuple)) and report and \
            isinstance(report[0], BoundReport):
        rows = list(report)
        row_type = BoundReport
    elif isinstance(report, (list, tuple)) and report and \
            isinstance(report[0], MetricsRow):
        rows = list(report)
        row_type = MetricsRow
    elif isinstance(report, (list, tuple)) and not report:
        rows = []
        row_type = None
    else:
        raise TypeError(f"cannot serialize {type(report).__name__}")
    if row_type is None:
        names = ["empty"]
    else:
        names = [f.name for f in fields(row_type)]
    header = []
    for name in names:
        header.append(name)
        if name in _RATIONAL_COLUMNS:
            header.append(name + "_exact")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        out = []
        for name in names:
            value = getattr(row, name)
            if name in _RATIONAL_COLUMNS:
                if value is None:
                    out.extend(["", ""])
                else:
                    decimal, exact = _csv_cell(Fraction(value))
                    out.extend([decimal, exact])
            elif isinstance(value, dict):
                out.append(";".join(f"{k}={v}" for k, v in sorted(value.items())))
            elif isinstance(value, float):
                out.append(f"{value:.6f}")
            elif value is None:
                out.append("")
            else:
                out.append(str(value))
        writer.writerow(out)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# mini LP reader (round-trips this repo's exports)


@dataclass(frozen=True)
class LpRow:
    name: str
    coeffs: tuple  # sorted (variable, coefficient) pairs
    sense: str  # <=, >=, =
    rhs: Fraction


@dataclass(frozen=True)
class LpModel:
    objective: tuple  # sorted (variable, coefficient) pairs
    rows: tuple
    binaries: frozenset
    generals: frozenset

    def variables(self):
        seen = set(v for v, _ in self.objective)
        for row in self.rows:
            seen.update(v for v, _ in row.coeffs)
        return seen


def _parse_terms(text, line_no):
    tokens = text.replace("+", " + ").replace("-", " - ").split()
    coeffs = {}
    sign = Fraction(1)
    pending = None  # numeric coefficient waiting for its variable
    for tok in tokens:
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        try:
            value = Fraction(tok)
        except ValueError:
            value = None
        if value is not None:
            if pending is not None:
                raise GraphParseError(line_no, "two numbers in a row")
            pending = sign * value
            sign = Fraction(1)
            continue
        coeff = pending if pending is not None else sign
        coeffs[tok] = coeffs.get(tok, Fraction(0)) + coeff
        pending = None
        sign = Fraction(1)
    if pending is not None:
        raise GraphParseError(line_no, "constraint ends with a bare number")
    return tuple(sorted((v, Fraction(c)) for v, c in coeffs.items()))


def parse_lp_mini(text: str) -> LpModel:
    """Structural reader for the LP dialect this repo writes.

    Handles Minimize / Subject To / Bounds / Binary / General / End with
    named rows and wrapped continuation lines; numbers parse exactly.
    """
    # glue continuation lines (they start with extra indentation)
    merged = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("\\") or not raw.strip():
            continue
        if raw.startswith("   ") and merged:
            merged[-1] = (merged[-1][0], merged[-1][1] + " " + raw.strip())
        else:
            merged.append((line_no, raw.strip()))
    section = None
    objective = ()
    rows = []
    binaries = set()
    generals = set()
    seen_end = False
    keywords = {"minimize": "objective", "maximize": "objective",
                "subject to": "rows", "bounds": "bounds",
                "binary": "binary", "general": "general", "end": "end"}
    for line_no, line in merged:
        low = line.lower()
        if low in keywords:
            section = keywords[low]
            if section == "end":
                seen_end = True
            continue
        if section == "objective":
            name, _, body = line.partition(":")
            objective = _parse_terms(body, line_no)
        elif section == "rows":
            name, colon, body = line.partition(":")
            if not colon:
                raise GraphParseError(line_no, "constraint row lacks a name")
            for sense in ("<=", ">=", "="):
                lhs, found, rhs = body.partition(sense)
                if found:
                    rows.append(LpRow(
                        name.strip(), _parse_terms(lhs, line_no), sense,
                        Fraction(rhs.strip()),
                    ))
                    break
            else:
                raise GraphParseError(line_no, "constraint row lacks a sense")
        elif section == "binary":
            binaries.update(line.split())
        elif section == "general":
            generals.update(line.split())
        elif section == "bounds":
            continue
        else:
            raise GraphParseError(line_no, f"content outside any section: "
                                           f"{line[:40]!r}")
    if not seen_end:
        raise GraphParseError(len(merged), "missing End keyword")
    return LpModel(objective, tuple(rows), frozenset(binaries),
                   frozenset(generals))

"""Command-line front end.

Exit codes: 0 success, 1 property violation, 2 configuration error, 3 size
guard. Output is deterministic for a given configuration and seed: rows are
emitted in input order, floats are printed at 17 significant digits, and
exact values are printed as ``num/den`` strings.
"""

from __future__ import annotations

import json
import math
import os
import re
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Sequence

import click

from .combinatorics import CACHE_ENV_VAR
from .cutoff import (
    cutoff_report,
    cutoff_shape,
    hyp_check,
    lindeberg_value,
    log_moments,
    truncation_report,
)
from .continuous_time import poissonized_law
from .laws import (
    PackDistribution,
    SizeGuardError,
    inverse_square_pack,
    law_after_k,
    tv_to_uniform,
)
from .verify import SUITES, suite_names

_FMT17 = ".17g"


@dataclass(frozen=True)
class RunConfig:
    """Canonical record of one CLI invocation; round-trips to JSON."""

    command: str
    n: int | None = None
    n_grid: str | None = None
    p_spec: str | None = None
    k_range: str | None = None
    t_grid: str | None = None
    tol: float | None = None
    seed: int | None = None
    n_samples: int | None = None
    a_n_expr: str | None = None
    fmt: str = "csv"
    cache_dir: str | None = None
    suite: str | None = None

    def to_json(self) -> str:
        data = {k: v for k, v in asdict(self).items() if v is not None}
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))


def _fmt(x: float) -> str:
    return format(float(x), _FMT17)


def parse_pack_spec(spec: str) -> PackDistribution | Callable[[int], PackDistribution]:
    """Parse ``m:prob,m:prob`` with exact fractional probabilities.

    Floats are rejected to preserve exactness. The special spec ``invsq``
    names the built-in deck-size-dependent inverse-square family and returns
    a callable of n.
    """
    spec = spec.strip()
    if spec == "invsq":
        return inverse_square_pack
    pairs: dict[int, Fraction] = {}
    for item in spec.split(","):
        item = item.strip()
        if not item:
            raise click.UsageError(f"empty entry in pack spec {spec!r}")
        try:
            m_text, prob_text = item.split(":")
        except ValueError:
            raise click.UsageError(f"bad pack entry {item!r}, want m:prob") from None
        prob_text = prob_text.strip()
        if "." in prob_text or "e" in prob_text.lower():
            raise click.UsageError(
                f"probability {prob_text!r} looks like a float; use exact fractions"
            )
        try:
            m = int(m_text)
            prob = Fraction(prob_text)
        except (ValueError, ZeroDivisionError):
            raise click.UsageError(f"bad pack entry {item!r}") from None
        if m in pairs:
            raise click.UsageError(f"duplicate pack count {m}")
        pairs[m] = prob
    try:
        return PackDistribution.from_pairs(pairs)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


def parse_k_range(text: str) -> range:
    match = re.fullmatch(r"\s*(\d+)\.\.(\d+)\s*", text)
    if not match:
        raise click.UsageError(f"bad k range {text!r}, want a..b")
    a, b = int(match.group(1)), int(match.group(2))
    if a > b:
        raise click.UsageError(f"empty k range {text!r}")
    return range(a, b + 1)


def parse_int_grid(text: str) -> list[int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise click.UsageError(f"bad grid {text!r}, want a:b:step")
    try:
        a, b, step = (int(p) for p in parts)
    except ValueError:
        raise click.UsageError(f"bad grid {text!r}") from None
    if step <= 0 or a > b:
        raise click.UsageError(f"bad grid {text!r}")
    return list(range(a, b + 1, step))


def parse_float_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise click.UsageError(f"bad grid {text!r}, want a:b:step")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise click.UsageError(f"bad grid {text!r}") from None
    if step <= 0 or a > b:
        raise click.UsageError(f"bad grid {text!r}")
    out = []
    value = a
    while value <= b + 1e-9 * max(1.0, abs(b)):
        out.append(value)
        value = a + len(out) * step
    return out

_A_N_ALLOWED = re.compile(r"^[0-9+\-*/(). ]*$")


def parse_a_n(expr: str, n: int) -> float:
    """Evaluate a truncation-level expression; the token ``logn`` is allowed."""
    body = expr.replace("logn", f"({math.log(n)!r})")
    if not _A_N_ALLOWED.fullmatch(body):
        raise click.UsageError(f"bad a-n expression {expr!r}")
    try:
        value = float(eval(body, {"__builtins__": {}}, {}))
    except (SyntaxError, ZeroDivisionError, NameError, TypeError):
        raise click.UsageError(f"bad a-n expression {expr!r}") from None
    if value <= 0:
        raise click.UsageError(f"a-n must be positive, got {value}")
    return value


def _apply_cache_dir(cache_dir: str | None) -> None:
    if cache_dir:
        os.environ[CACHE_ENV_VAR] = cache_dir


def _require_fixed_pack(parsed, spec: str) -> PackDistribution:
    if callable(parsed):
        raise click.UsageError(f"pack family {spec!r} needs --n-grid")
    return parsed


@click.group()
def main() -> None:
    """Exact and Monte-Carlo mixing profiles for randomized riffle shuffles."""


@main.command()
@click.option("--n", type=int, required=True, help="Deck size.")
@click.option("--p", "p_spec", required=True, help="Pack distribution, m:prob[,m:prob...].")
@click.option("--k", "k_range", required=True, help="Shuffle counts, a..b.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--cache", "cache_dir", default=None, help="Eulerian cache directory.")
def profile(n: int, p_spec: str, k_range: str, fmt: str, cache_dir: str | None) -> None:
    """Exact TV profile over a range of shuffle counts.

    Emits one row per k with the exact rational distance, its float
    rendering, and the normal approximation evaluated at the geometric-mean
    pack count for k steps.
    """
    _apply_cache_dir(cache_dir)
    config = RunConfig(
        command="profile", n=n, p_spec=p_spec, k_range=k_range, fmt=fmt, cache_dir=cache_dir
    )
    pack = _require_fixed_pack(parse_pack_spec(p_spec), p_spec)
    ks = parse_k_range(k_range)
    mu, _ = log_moments(pack)
    try:
        rows = []
        for k in ks:
            tv = tv_to_uniform(law_after_k(n, pack, k))
            estimate = cutoff_shape(math.exp(1.5 * math.log(n) - k * mu)) if mu > 0 else 1.0
            rows.append(
                {
                    "k": k,
                    "tv_exact": f"{tv.numerator}/{tv.denominator}",
                    "tv_float": _fmt(float(tv)),
                    "bd_estimate": _fmt(estimate),
                }
            )
    except SizeGuardError as exc:
        click.echo(f"size guard: {exc}", err=True)
        sys.exit(3)
    _emit_rows(rows, ["k", "tv_exact", "tv_float", "bd_estimate"], fmt, config)


@main.command()
@click.option("--n", type=int, default=None, help="Deck size.")
@click.option("--n-grid", "n_grid", default=None, help="Deck sizes, a:b:step.")
@click.option("--p", "p_spec", required=True, help="Pack distribution or 'invsq'.")
@click.option("--a-n", "a_n_expr", default=None, help="Truncation level; 'logn' allowed.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json")
@click.option("--cache", "cache_dir", default=None)
def cutoff(
    n: int | None,
    n_grid: str | None,
    p_spec: str,
    a_n_expr: str | None,
    fmt: str,
    cache_dir: str | None,
) -> None:
    """Cutoff-parameter report, or per-n condition values over an n-grid."""
    _apply_cache_dir(cache_dir)
    config = RunConfig(
        command="cutoff", n=n, n_grid=n_grid, p_spec=p_spec,
        a_n_expr=a_n_expr, fmt=fmt, cache_dir=cache_dir,
    )
    parsed = parse_pack_spec(p_spec)
    if (n is None) == (n_grid is None):
        raise click.UsageError("give exactly one of --n or --n-grid")

    if n is not None:
        pack = _require_fixed_pack(parsed, p_spec)
        try:
            report = cutoff_report(pack, n)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from None
        payload = {"config": json.loads(config.to_json()), "report": report.to_json_dict()}
        if a_n_expr is not None:
            trunc = truncation_report(pack, n, parse_a_n(a_n_expr, n))
            payload["truncation"] = trunc.to_json_dict()
        click.echo(json.dumps(payload, sort_keys=True, indent=2))
        return

    rows = []
    for size in parse_int_grid(n_grid):
        pack = parsed(size) if callable(parsed) else parsed
        mu, sigma = log_moments(pack)
        if mu <= 0:
            raise click.UsageError("pack distribution concentrated at 1 never mixes")
        row = {
            "n": size,
            "mu": _fmt(mu),
            "sigma": _fmt(sigma),
            "t_n": _fmt(3 * math.log(size) / (2 * mu)),
            "lindeberg_eps1": _fmt(lindeberg_value(pack, size, 1.0)) if sigma > 0 else "",
        }
        h1, h2 = hyp_check(pack, size, 0.5)
        row["hyp1"] = _fmt(h1)
        row["hyp2"] = _fmt(h2)
        if a_n_expr is not None:
            trunc = truncation_report(pack, size, parse_a_n(a_n_expr, size))
            row["ratio_z"] = _fmt(trunc.ratio_z)
            row["ratio_y"] = _fmt(trunc.ratio_y)
            row["t_n_truncated"] = _fmt(trunc.t_n_truncated)
        rows.append(row)
    header = list(rows[0].keys())
    _emit_rows(rows, header, fmt, config)


@main.command()
@click.option("--suite", "suite", default="all", help="Suite name or 'all'.")
@click.option("--n", "n_bound", type=int, default=None, help="Deck-size bound override.")
@click.option("--m", "m_bound", type=int, default=None, help="Pack-count bound override.")
@click.option("--seed", type=int, default=0)
@click.option("--N", "n_samples", type=int, default=100_000, help="Sampler suite sample count.")
@click.option("--dump-csv", "dump_csv", default=None, help="Write sampler draws (trial,r) here.")
@click.option("--cache", "cache_dir", default=None)
def verify(
    suite: str,
    n_bound: int | None,
    m_bound: int | None,
    seed: int,
    n_samples: int,
    dump_csv: str | None,
    cache_dir: str | None,
) -> None:
    """Run exact property suites; nonzero exit on any violation."""
    _apply_cache_dir(cache_dir)
    config = RunConfig(
        command="verify", suite=suite, n=n_bound, seed=seed,
        n_samples=n_samples, cache_dir=cache_dir,
    )
    if suite == "all":
        selected = suite_names()
    elif suite in SUITES:
        selected = [suite]
    else:
        raise click.UsageError(f"unknown suite {suite!r}; try one of {suite_names()}")

    dump_sink = None
    if dump_csv is not None:
        from .sampling import write_sample_csv

        handle = open(dump_csv, "w")

        def dump_sink(n, m, r_values, _handle=handle):  # noqa: ANN001
            write_sample_csv(_handle, r_values)

    results: dict[str, list[dict]] = {}
    try:
        for name in selected:
            kwargs: dict = {"seed": seed, "n_samples": n_samples}
            if n_bound is not None:
                kwargs["n_max"] = n_bound
            if m_bound is not None:
                kwargs["m_max"] = m_bound
            if name == "sampler" and dump_sink is not None:
                kwargs["dump"] = dump_sink
            results[name] = SUITES[name](**kwargs)
    except SizeGuardError as exc:
        click.echo(f"size guard: {exc}", err=True)
        sys.exit(3)
    finally:
        if dump_csv is not None:
            handle.close()

    ok = all(v["ok"] for verdicts in results.values() for v in verdicts)
    payload = {"config": json.loads(config.to_json()), "ok": ok, "suites": results}
    click.echo(json.dumps(payload, sort_keys=True, indent=2))
    if not ok:
        sys.exit(1)


@main.command()
@click.option("--n", type=int, required=True, help="Deck size.")
@click.option("--p", "p_spec", required=True, help="Pack distribution, m:prob[,m:prob...].")
@click.option("--t", "t_grid", required=True, help="Times, a:b:step.")
@click.option("--tol", type=float, default=1e-9, help="Poisson tail tolerance.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--cache", "cache_dir", default=None)
def poisson(
    n: int, p_spec: str, t_grid: str, tol: float, fmt: str, cache_dir: str | None
) -> None:
    """TV distance of the continuous-time chain on a time grid."""
    _apply_cache_dir(cache_dir)
    config = RunConfig(
        command="poisson", n=n, p_spec=p_spec, t_grid=t_grid, tol=tol, fmt=fmt,
        cache_dir=cache_dir,
    )
    pack = _require_fixed_pack(parse_pack_spec(p_spec), p_spec)
    if not 0 < tol < 1:
        raise click.UsageError(f"tolerance must be in (0, 1), got {tol}")
    rows = []
    try:
        for t in parse_float_grid(t_grid):
            law = poissonized_law(n, pack, t, tol)
            tv = law.tv_to_uniform()
            rows.append(
                {
                    "t": _fmt(t),
                    "tv": _fmt(tv.value),
                    "certificate": _fmt(tv.certificate),
                    "truncation_k": law.truncation_k,
                }
            )
    except SizeGuardError as exc:
        click.echo(f"size guard: {exc}", err=True)
        sys.exit(3)
    _emit_rows(rows, ["t", "tv", "certificate", "truncation_k"], fmt, config)


def _emit_rows(rows: Sequence[dict], header: Sequence[str], fmt: str, config: RunConfig) -> None:
    if fmt == "csv":
        click.echo(",".join(header))
        for row in rows:
            click.echo(",".join(str(row.get(col, "")) for col in header))
    else:
        payload = {"config": json.loads(config.to_json()), "rows": list(rows)}
        click.echo(json.dumps(payload, sort_keys=True, indent=2))


if __name__ == "__main__":
    main()

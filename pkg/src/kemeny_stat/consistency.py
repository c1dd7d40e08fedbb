"""Cross-checks between closed forms, fitted curves, tabulated anchors, and oracles.

Every quantity with more than one independent source gets a row comparing
the sources side by side.  Disagreements are documented with a flag and a
note -- never patched, reconciled, or failed on.  The report also lists the
desk-scale substitutions made where the original data or replication scale
is out of reach.
"""

from __future__ import annotations

from fractions import Fraction

from . import __version__ as _version
from .enum_oracle import MAX_ENUM_N, exact_moments
from .null_models import (
    alpha_of_n,
    beta_binomial_variance,
    implied_std_kurtosis,
    kurtosis_poly,
    null_table,
    population_variance,
    power_kernel_fourth_moment,
    riffled_moments,
    riffled_variance_mixture,
    spearman_kurtosis_poly,
    variance_poly,
)
from .reference import (
    NULL_EXCESS_KURTOSIS_BY_N,
    NULL_STD_BY_N,
    SPEARMAN_STD_KURTOSIS_BY_N,
    TWO_SIDED_CUTOFF_N15,
)

__all__ = ["consistency_report", "render_text"]

_AGREE_TOL = 5e-3


def _row(quantity: str, n: int | None = None, *, note: str = "", **values) -> dict:
    """Assemble one comparison row and auto-derive deviation and flag."""
    present = {k: v for k, v in values.items() if isinstance(v, (int, float))}
    deviation = None
    flag = "info"
    if len(present) >= 2:
        anchor_key = next(iter(present))
        anchor = present[anchor_key]
        scale = max(abs(v) for v in present.values())
        if scale > 0:
            deviation = max(abs(v - anchor) for v in present.values()) / scale
            flag = "agree" if deviation <= _AGREE_TOL else "deviates"
    row = {"quantity": quantity, "n": n}
    row.update(values)
    row["deviation"] = deviation
    row["flag"] = flag
    row["note"] = note
    return row


def consistency_report(max_oracle_n: int = 6) -> dict:
    """Build the full structured comparison table."""
    if not 2 <= max_oracle_n <= MAX_ENUM_N:
        raise ValueError(f"oracle range is 2..{MAX_ENUM_N}")
    oracle: dict[int, tuple[Fraction, Fraction]] = {
        n: exact_moments(n) for n in range(2, max_oracle_n + 1)
    }
    rows: list[dict] = []

    # --- null variance: closed form vs fitted curve vs table vs enumeration
    for n in sorted(NULL_STD_BY_N):
        extra: dict = {}
        note = ""
        if n in oracle:
            extra["oracle"] = float(oracle[n][0])
            note = f"oracle exact {oracle[n][0]}"
        if 27 <= n <= 35:
            extra["shifted_match"] = float(population_variance(n + 1))
            note = (
                "tabulated sd rows 27-35 are each displaced by one position "
                "(the printed value matches the n+1 closed form)"
            )
        elif n == 36:
            note = (
                "the tabulated sd here repeats the previous printed row yet "
                "matches the n = 36 closed form: the one-row displacement of "
                "rows 27-35 ends with this duplicate"
            )
        rows.append(
            _row(
                "null_variance",
                n,
                closed_form=float(population_variance(n)),
                fitted=variance_poly(n) if n >= 9 else None,
                tabulated=NULL_STD_BY_N[n] ** 2,
                note=note,
                **extra,
            )
        )

    # --- null kurtosis: fitted curve vs table (n >= 9)
    for n in sorted(NULL_EXCESS_KURTOSIS_BY_N):
        if n < 9:
            continue
        rows.append(
            _row(
                "null_kurtosis_fit_vs_table",
                n,
                fitted=kurtosis_poly(n),
                tabulated=NULL_EXCESS_KURTOSIS_BY_N[n],
                note="fitted curve is monotone only up to n ~ 94 "
                "(quadratic exponent turns)" if n >= 90 else "",
            )
        )

    # --- null kurtosis: table vs enumeration vs shape-implied value (small n)
    for n in range(2, max_oracle_n + 1):
        variance, std_kurt = oracle[n]
        implied = None
        if n >= 3:
            implied = implied_std_kurtosis(float(alpha_of_n(n))) - 3.0
        rows.append(
            _row(
                "null_kurtosis_table_vs_oracle",
                n,
                oracle=float(std_kurt) - 3.0,
                tabulated=NULL_EXCESS_KURTOSIS_BY_N.get(n),
                shape_implied=implied,
                note=f"oracle exact {std_kurt} - 3",
            )
        )

    # --- midrank-correlation kurtosis: fitted cubic vs exact table
    for n in sorted(SPEARMAN_STD_KURTOSIS_BY_N):
        rows.append(
            _row(
                "midrank_kurtosis_fit_vs_table",
                n,
                fitted=spearman_kurtosis_poly(n),
                tabulated=SPEARMAN_STD_KURTOSIS_BY_N[n],
                note="fitted cubic exceeds the Gaussian bound 3 above n ~ 19"
                if n == 19 else "",
            )
        )

    # --- mixture variance display vs closed form vs matched beta-binomial
    for n in range(3, max_oracle_n + 1):
        alpha = alpha_of_n(n)
        m = n * (n - 1) // 2
        rows.append(
            _row(
                "mixture_variance_vs_closed_form",
                n,
                closed_form=float(population_variance(n)),
                mixture=riffled_moments(m, float(alpha), float(alpha), 0.5).mu2,
                mixture_reduced=riffled_variance_mixture(m, float(alpha), float(alpha)),
                beta_binomial=float(beta_binomial_variance(n * n - n, alpha)),
                note="the equal-weight mixture display does not reduce to the "
                "closed-form variance; the plain beta-binomial at the same "
                "shape does, exactly",
            )
        )

    # --- mixture fourth moment vs enumeration
    for n in range(3, max_oracle_n + 1):
        alpha = float(alpha_of_n(n))
        m = n * (n - 1) // 2
        variance, std_kurt = oracle[n]
        mu4_oracle = float(std_kurt * variance * variance)
        rows.append(
            _row(
                "mixture_fourth_moment_vs_oracle",
                n,
                oracle=mu4_oracle,
                mixture=riffled_moments(m, alpha, alpha, 0.5).mu4,
                substituted_display=power_kernel_fourth_moment(n, alpha),
                note="the n-substituted display equals 4x the standardised "
                "kurtosis, not a raw fourth moment",
            )
        )

    # --- the n = 15 standardised cutoff
    rows.append(
        _row(
            "null_cutoff_n15",
            15,
            constructed=null_table(15).standardized_cutoff(0.05),
            tabulated=TWO_SIDED_CUTOFF_N15,
            note="the tabulated +/-1.8500 cutoff is reproduced by the n = 5 "
            f"construction instead ({null_table(5).standardized_cutoff(0.05):.4f})",
        )
    )

    # --- scale conventions that carry no numbers, documented as info rows
    rows.append(
        _row(
            "midrank_z_scaling",
            note="the ratio display rho/sqrt(n-1) has null variance ~ (n-1)^-2; "
            "tests calibrate with rho*sqrt(n-1) (unit variance) and only the "
            "reported statistic honours the ratio form",
        )
    )
    rows.append(
        _row(
            "distance_affine_vs_metric",
            note="the affine distance m + D - C exceeds the metric form "
            "2D + Tx + Ty by exactly the jointly-tied pair count; they "
            "coincide on tie-free data",
        )
    )

    # --- desk-scale substitutions
    for note in (
        "tied z comparison and continuous z table: the original 2,236-row "
        "ordinal source sample is unavailable; discretized (4-level) and "
        "continuous bivariate normal populations with matched rank "
        "correlation are substituted",
        "replication counts: source studies used 5,000-15,000 replications; "
        "desk-scale default is 2,000 (configurable upward)",
        "large-n distance distribution summaries: source used 3,294,172 "
        "sampled vectors; here closed forms plus exhaustive enumeration "
        f"(n <= {max_oracle_n}) stand in",
    ):
        rows.append(_row("substitution", note=note))

    return {
        "artifact_version": _version,
        "comparison_tolerance": _AGREE_TOL,
        "rows": rows,
    }


def render_text(report: dict) -> str:
    """Flat text rendering: one line per row plus flagged notes."""
    lines = [
        f"consistency report (artifact {report['artifact_version']}, "
        f"agree tolerance {report['comparison_tolerance']})",
    ]
    numeric_keys = (
        "closed_form", "fitted", "tabulated", "oracle", "mixture",
        "mixture_reduced", "beta_binomial", "shape_implied", "shifted_match",
        "constructed", "substituted_display",
    )
    for row in report["rows"]:
        n_txt = f" n={row['n']}" if row["n"] is not None else ""
        parts = [f"[{row['flag']:8s}] {row['quantity']}{n_txt}"]
        for key in numeric_keys:
            value = row.get(key)
            if isinstance(value, (int, float)):
                parts.append(f"{key}={value:.6g}")
        if row["deviation"] is not None:
            parts.append(f"dev={row['deviation']:.3g}")
        lines.append("  ".join(parts))
        if row["note"]:
            lines.append(f"           note: {row['note']}")
    counts = {}
    for row in report["rows"]:
        counts[row["flag"]] = counts.get(row["flag"], 0) + 1
    lines.append(
        "totals: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    )
    return "\n".join(lines) + "\n"

"""Certification bundles, counting campaigns and the consolidated report."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

from .arith import BadPrimeError, is_prime
from .counting import BRUTE_CAP, CountReport, count_W_strata
from .genericity import FAIL, INCONCLUSIVE, PASS
from .gf import check_odd_prime_power
from .threefold import (
    CHARTS,
    FIBER_TAGS,
    chart_smoothness_check,
    classify_fiber,
    exceptional_surface,
    fiber_census,
    load_instance,
    instance_from_json,
    rational_nodes,
    singular_locus_certificate,
    splitting_statistics,
)

REPORT_FORMAT = "symforge-report/1"
CHART_PRIMES = (11, 13)
SINGULAR_PRIMES = (11, 13, 17)


def reference_instance():
    """The pinned, certified instance shipped with the package."""
    text = resources.files("symforge").joinpath("data/reference_instance.json").read_text()
    return instance_from_json(json.loads(text))


def report_schema() -> dict:
    text = resources.files("symforge").joinpath("data/report.schema.json").read_text()
    return json.loads(text)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("SYMFORGE_THREADS", "1")))
    except ValueError:
        return 1


def parse_primes(text: str) -> list[int]:
    """Parse "3..100" (odd primes in the range) or comma lists like "11,13,121"."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = (int(x) for x in part.split("..", 1))
            out.extend(p for p in range(max(lo, 3), hi + 1) if is_prime(p))
        else:
            out.append(int(part))
    return sorted(set(out))


def combine_status(statuses) -> str:
    statuses = list(statuses)
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return PASS


def _skip_entry(inst, q, reason):
    p = q
    try:
        p = check_odd_prime_power(q).p
    except BadPrimeError:
        return {"q": q, "reason": "not an odd prime power", "witness": None}
    return {"q": q, "reason": reason, "witness": inst.bad_prime_witness(p)}


# ---------------------------------------------------------------------------
# certification


def certify_bundle(inst, chart_primes=CHART_PRIMES, singular_primes=SINGULAR_PRIMES) -> dict:
    """Genericity, singular locus, chart smoothness and exceptional surface in one dict."""
    gen = inst.certify()
    good_sing = [p for p in singular_primes if inst.is_good(p)]
    skipped = [_skip_entry(inst, p, "bad prime") for p in singular_primes if not inst.is_good(p)]
    sing = singular_locus_certificate(inst, good_sing) if gen.passed else None
    charts = []
    for q in chart_primes:
        if not inst.is_good(q):
            skipped.append(_skip_entry(inst, q, "bad prime"))
            continue
        charts.extend(chart_smoothness_check(inst, c, q) for c in CHARTS)
    es = exceptional_surface(inst)
    es_ok = es.simple and es.degenerate_fibers == 6
    statuses = [gen.status]
    if sing is not None:
        statuses.append(PASS if sing.valid else FAIL)
    statuses.extend(c["status"] for c in charts)
    statuses.append(PASS if es_ok else FAIL)
    failed = [c.condition for c in gen.certificates if c.status != PASS]
    if sing is not None and not sing.valid:
        failed.append("singular locus")
    failed.extend(f"chart {tuple(c['chart'])} at q = {c['q']}" for c in charts if c["status"] != PASS)
    if not es_ok:
        failed.append("exceptional surface")
    return {
        "status": combine_status(statuses),
        "failed": failed,
        "genericity": gen.to_json(),
        "singular_locus": sing.to_json() if sing is not None else None,
        "charts": charts,
        "exceptional_surface": dict(es.to_json(), status=PASS if es_ok else FAIL),
        "skipped": skipped,
    }


# ---------------------------------------------------------------------------
# counting campaign


def _count_one(inst, q, brute_cap, timings):
    try:
        check_odd_prime_power(q)
        inst.require_good(q)
        return count_W_strata(inst, q, brute_cap=brute_cap, timings=timings)
    except BadPrimeError as exc:
        entry = _skip_entry(inst, q, exc.reason)
        if exc.witness is not None:
            entry["witness"] = exc.witness
        return entry


def run_campaign(inst, q_list, brute_cap: int = BRUTE_CAP, timings: bool = False, threads=None) -> dict:
    """count_W_strata over every q, in parallel but assembled in input order."""
    inst.certify()
    inst.witness_integers()
    threads = threads or thread_count()
    q_list = list(q_list)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda q: _count_one(inst, q, brute_cap, timings), q_list))
    else:
        results = [_count_one(inst, q, brute_cap, timings) for q in q_list]
    reports = [r.to_json() for r in results if isinstance(r, CountReport)]
    skipped = [r for r in results if not isinstance(r, CountReport)]
    return {
        "reports": reports,
        "skipped": skipped,
        "pass": all(r["pass"] for r in reports),
    }


def _short_int(n) -> str:
    s = str(n)
    return s if len(s) <= 24 else f"{s[:12]}...({len(s)} digits)"


def campaign_table(campaign: dict) -> str:
    lines = [f"{'q':>5} {'#V':>10} {'#S':>6} {'#Vtilde':>10} {'nodes':>5} {'#W':>10}  V,W mod q  ok"]
    for r in campaign["reports"]:
        c, res = r["counts"], r["residues"]
        lines.append(
            f"{r['q']:>5} {c['V']:>10} {c['S']:>6} {c['Vtilde']:>10} "
            f"{c['node_scheme_rational_points']:>5} {c['W']:>10}  {res['V']},{res['W']:<8} "
            f"{'yes' if r['pass'] else 'NO'}"
        )
    for s in campaign["skipped"]:
        lines.append(f"{s['q']:>5} skipped: {s['reason']} (witness {_short_int(s['witness'])})")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# fibers


def fiber_section(inst, q: int) -> dict:
    """Fiber census at q next to independent per-point classification."""
    from .gf import field_for_q, projective_points

    census = fiber_census(inst, q)
    fld = field_for_q(q).field
    per_point = dict.fromkeys(FIBER_TAGS, 0)
    double = 0
    for row in projective_points(q, 2):
        a = [fld.from_code(int(x)) for x in row]
        ft = classify_fiber(inst, a)
        per_point[ft.tag] += 1
        if (ft.in_E1 or ft.in_E2) and ft.in_D:
            double += 1
    return {
        "census": census,
        "per_point": per_point,
        "E1_E2_points": len(rational_nodes(inst, q)),
        "E_cap_D_points": double,
        "splitting": splitting_statistics(inst, q),
    }


# ---------------------------------------------------------------------------
# the consolidated report


def build_report(inst, fiber_q: int = 11, q_list=(), brute_cap: int = BRUTE_CAP, timings: bool = False) -> dict:
    cert = certify_bundle(inst)
    fibers = fiber_section(inst, fiber_q) if inst.is_good(fiber_q) else None
    campaign = run_campaign(inst, q_list, brute_cap, timings)
    status = cert["status"]
    if status == PASS and not campaign["pass"]:
        status = FAIL
    return {
        "format": REPORT_FORMAT,
        "h": str(inst.h),
        "instance": inst.to_json(),
        "certificates": cert,
        "fibers": fibers,
        "counting": campaign,
        "status": status,
    }


def validate_report(report: dict) -> None:
    import jsonschema

    jsonschema.validate(report, report_schema())


def render_text(report: dict) -> str:
    out = [f"symforge report ({report['format']})", "", "h =", f"  {report['h']}", ""]
    cert = report["certificates"]
    out.append(f"certification: {cert['status']}")
    for c in cert["genericity"]:
        extra = f" (count {c['witnesses']['count']})" if "count" in c.get("witnesses", {}) else ""
        out.append(f"  {c['condition']:<20} {c['status']}{extra}")
    sing = cert["singular_locus"]
    if sing is not None:
        out.append(f"  {'singular locus':<20} {'pass' if sing['valid'] else 'fail'} "
                   f"(L plus {sing['node_count']} nodes)")
        for m in sing["modular"]:
            if m.get("skipped"):
                out.append(f"    p = {m['p']}: skipped")
            else:
                out.append(f"    p = {m['p']}: {m['singular_points']} singular points, "
                           f"{m['rational_nodes']} rational nodes, orbits {m['census']['orbits']}")
    charts = cert["charts"]
    bad_charts = [c for c in charts if c["status"] != PASS]
    out.append(f"  {'blowup charts':<20} {len(charts) - len(bad_charts)}/{len(charts)} pass")
    es = cert["exceptional_surface"]
    out.append(f"  {'exceptional surface':<20} {es['status']} ({es['degenerate_fibers']} degenerate fibers)")
    fib = report["fibers"]
    if fib is not None:
        c = fib["census"]
        out.append("")
        out.append(f"fiber types over P^2(F_{c['q']}):")
        for tag in FIBER_TAGS:
            out.append(f"  {tag:<16} {c[tag]}")
        for name, st in fib["splitting"].items():
            out.append(f"  along {name}: {st['split']} split, {st['nonsplit']} nonsplit, "
                       f"{st['ramified']} ramified, {st['on_A']} on A")
    out.append("")
    out.append("counting:")
    out.append(campaign_table(report["counting"]))
    out.append("")
    out.append(f"status: {report['status']}")
    return "\n".join(out) + "\n"


__all__ = [
    "reference_instance",
    "report_schema",
    "parse_primes",
    "certify_bundle",
    "run_campaign",
    "campaign_table",
    "fiber_section",
    "build_report",
    "validate_report",
    "render_text",
    "load_instance",
]

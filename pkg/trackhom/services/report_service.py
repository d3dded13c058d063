from __future__ import annotations

import json
from typing import Dict, List

from trackhom.models.schemas import FixtureDoc, Report, TheoryTable


def _describe(factors: List[int]) -> str:
    if not factors:
        return "0"
    return " ⊕ ".join("Z" if d == 0 else f"Z/{d}" for d in factors)


def _table_lines(table: TheoryTable) -> List[str]:
    lines = [f"  {table.theory}:"]
    lines.extend(f"    H^{s} = {_describe(factors)}" for s, factors in enumerate(table.groups))
    if table.normalized_agrees is not None:
        lines.append(f"    normalized complex agrees: {'yes' if table.normalized_agrees else 'NO'}")
    return lines


def render_text(report: Report) -> str:
    lines = [
        f"trackhom {report.command}: {report.fixture_name}",
        f"fixture hash {report.fixture_hash}",
        f"max degree {report.max_degree}",
    ]
    for check in report.validation:
        status = "ok" if check.ok else f"{len(check.violations)} violations"
        lines.append(f"validate {check.subject}: {status} ({check.checked} checks)")
        lines.extend(f"  - {v}" for v in check.violations)
    if report.gate is not None:
        gate = report.gate
        verdict = "accepted" if gate.accepted else f"rejected ({gate.reason})"
        lines.append(f"gate: {verdict}, bound {gate.bound}")
        if gate.predicted_counts:
            lines.append(f"  predicted |g_m|: {', '.join(str(n) for n in gate.predicted_counts)}")
        if gate.witness:
            lines.append(f"  cycle witness: {' -> '.join(gate.witness)}")
    if report.resolution is not None:
        lines.append("resolution:")
        for level in report.resolution.levels:
            mark = "" if level.matches else f" (predicted {level.predicted})"
            lines.append(f"  level {level.level}: {level.generators} generators{mark}")
        lines.append(f"  simplicial identities: {'ok' if report.resolution.simplicial_identities_ok else 'FAIL'}")
        lines.extend(f"  - {v}" for v in report.resolution.violations)
    if report.cohomology:
        lines.append("cohomology:")
        for table in report.cohomology:
            lines.extend(_table_lines(table))
    for ses in report.ses:
        sizes = ", ".join(f"{k} {v}" for k, v in ses.sizes.items())
        lines.append(f"ses level {ses.level}: {'exact' if ses.ok else 'NOT EXACT'} ({sizes})")
    if report.les is not None:
        les = report.les
        lines.append(f"les: {'exact' if les.exact else 'NOT EXACT'}")
        for node in les.nodes:
            lines.append(f"  {node.label}: {node.status}")
        lines.append(f"  connecting maps independent of lift: {'yes' if les.connecting_choice_invariant else 'NO'}")
    for comparison in report.comparisons:
        lines.append(f"{comparison.name}: {'agrees' if comparison.agrees else 'DIFFERS'}")
        for s, left, right in zip(comparison.degrees, comparison.left, comparison.right):
            lines.append(f"  degree {s}: {_describe(left)} vs {_describe(right)}")
    if report.nerve is not None:
        nerve = report.nerve
        lines.append(f"nerve: simplices {nerve.simplices}, nondegenerate {nerve.nondegenerate}")
        lines.append(f"  simplicial identities: {'ok' if nerve.identities_ok else 'FAIL'}")
        lines.extend(f"  {row}" for row in nerve.rendered)
        if nerve.export_path:
            lines.append(f"  exported to {nerve.export_path}")
    if report.timing:
        lines.append("timing: " + ", ".join(f"{k} {v:.3f}s" for k, v in report.timing.items()))
    lines.append("PASS" if report.passed else "FAIL")
    return "\n".join(lines) + "\n"


def render_json(report: Report) -> str:
    return report.model_dump_json(indent=2) + "\n"


def emit_report(report: Report, output_format: str = "text") -> str:
    if output_format == "json":
        return render_json(report)
    if output_format == "text":
        return render_text(report)
    raise ValueError(f"unknown report format: {output_format}")


def json_schemas() -> Dict[str, dict]:
    return {"fixture": FixtureDoc.model_json_schema(), "report": Report.model_json_schema()}


def render_schema(kind: str) -> str:
    schemas = json_schemas()
    if kind not in schemas:
        raise ValueError(f"unknown schema: {kind}")
    return json.dumps(schemas[kind], indent=2, sort_keys=True) + "\n"

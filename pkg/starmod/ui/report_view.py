"""Plain-text rendering of scenario reports."""

from typing import Dict, List

WIDTH = 80


def _task_lines(task: Dict) -> List[str]:
    details = task.get("details", {})
    line = f"[{task['status'].upper():8}] {task['id']} ({task['kind']})"
    if "runtime_ms" in task:
        line += f"  {task['runtime_ms']:.1f} ms"
    lines = [line]
    for check in details.get("checks", []):
        mark = "ok" if check["pass"] else f"FAILS at order {check['first_failing_order']}"
        lines.append(f"    - {check['axiom']}: {mark} ({check['samples']} samples)")
    if "index" in details:
        lines.append(f"    index: {', '.join(details['index'])}")
    if "equivalent" in details:
        witness = details.get("witness")
        suffix = f" via {witness['action']} with class {witness['class']}" if witness else ""
        lines.append(f"    equivalent: {details['equivalent']}{suffix}")
    if "result" in details:
        lines.append(f"    result: v0 = {details['result']['v0']}, higher = {details['result']['higher']}")
    if "full" in details:
        lines.append(f"    full: {details['full']}, rank {details['rank']}")
    if "generator_count" in details:
        lines.append(f"    kernel: torus dimension {details['torus_dimension']}, "
                     f"free layers {details['free_layers']}, {details['torsion']}")
    if "error" in details:
        lines.append(f"    error: {details['type']}: {details['error']}")
    return lines


def render_text(report: Dict) -> str:
    """Human-readable report with the same task statuses as the JSON form."""
    lines = ["=" * WIDTH, f"STARMOD REPORT: {report.get('scenario') or 'unnamed scenario'}", "=" * WIDTH]
    algebra = report["algebra"]
    lines.append(f"Algebra: {algebra['kind']}  K = {report['K']}  seed = {report['seed']}")
    conventions = ", ".join(f"{k}={v}" for k, v in sorted(report.get("conventions", {}).items()))
    lines.append(f"Conventions: {conventions}")
    lines.append("")
    for task in report["tasks"]:
        lines.extend(_task_lines(task))
    lines.append("")
    summary = report["summary"]
    lines.append("Summary: " + ", ".join(f"{k} {v}" for k, v in summary.items()))
    lines.append("=" * WIDTH)
    return "\n".join(lines) + "\n"


def display_results_summary(report: Dict, output_path: str) -> bool:
    """Print a short summary after a run.

    Returns:
        True if no task failed or errored
    """
    summary = report["summary"]
    print(f"\n{'=' * WIDTH}")
    print("SCENARIO RUN COMPLETE")
    print(f"{'=' * WIDTH}")
    print(f"Tasks: {len(report['tasks'])}")
    for status, count in summary.items():
        print(f"  - {status}: {count}")
    print(f"\nReport saved to: {output_path}")
    print(f"{'=' * WIDTH}")
    return summary.get("fail", 0) == 0 and summary.get("error", 0) == 0

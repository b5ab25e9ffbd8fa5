"""
Plain-text plan reports for RMTT-Workbench.

One line per step, fields in a fixed order, then a footer with the self-join
total. The format is documented in docs/EXPLAIN_FORMAT.md.
"""

import logging
from typing import Dict, Iterable, List

from modules.query.planner import Plan, PlanStep
from modules.query.sparql_parser import PatternTerm, QueryPattern

logger = logging.getLogger(__name__)


def compact_term(term: PatternTerm, prefixes: Dict[str, str]) -> str:
    """Render a pattern term, shortening IRIs with the longest matching prefix."""
    if term.is_var or term.to_term().is_literal:
        return str(term)
    best = None
    for prefix, base in prefixes.items():
        local = term.value[len(base):]
        if term.value.startswith(base) and local and all(c.isalnum() or c in '_-' for c in local):
            if best is None or len(base) > len(prefixes[best]):
                best = prefix
    if best is None:
        return str(term)
    return f"{best}:{term.value[len(prefixes[best]):]}"


def render_pattern(pattern: QueryPattern, prefixes: Dict[str, str]) -> str:
    return ' '.join(compact_term(t, prefixes) for t in pattern)


def _tables(tables: Iterable[str]) -> str:
    tables = sorted(tables)
    return '{' + ','.join(tables) + '}' if tables else '{}'


def _step_line(step: PlanStep, prefixes: Dict[str, str]) -> str:
    if step.is_scan:
        kind = "scan"
    elif step.is_cartesian:
        kind = "cross"
    else:
        kind = "join[" + ','.join(f"?{v.name}:{v.pair}" for v in step.join_vars) + "]"
    fields = [
        f"step {step.index}",
        kind,
        f"pattern#{step.pattern_index} {render_pattern(step.pattern, prefixes)}",
        f"order={step.order.value if step.order else '-'}",
        f"est={step.estimate}",
        f"left={_tables(step.provenance_left) if not step.is_scan else '-'}",
        f"right={_tables(step.provenance_right)}",
    ]
    if step.branches:
        fields.append("branches=" + ';'.join(
            f"{'+'.join(combo)}->{_tables(targets)}" for combo, targets in sorted(step.branches.items())))
    fields.append(f"self-join={'yes' if step.self_join_flag else 'no'}")
    return '  '.join(fields)


def explain(plan: Plan) -> str:
    """
    Render a plan as stable plain text.

    Args:
        plan: Plan to describe

    Returns:
        str: Report ending in a newline
    """
    prefixes = plan.query.prefixes
    lines: List[str] = [f"engine {plan.engine}: {len(plan.steps)} patterns, {plan.join_count} joins"]
    if plan.empty:
        lines.append("empty result: a query constant is not in the dictionary")
    lines.extend(_step_line(step, prefixes) for step in plan.steps)
    count = plan.plan_self_joins
    lines.append(f"{count} self-join{'' if count == 1 else 's'}")
    return '\n'.join(lines) + '\n'

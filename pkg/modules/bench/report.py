"""
Benchmark report writers for RMTT-Workbench.
Emits CSV rows and a markdown grid of queries by engine.
"""

import os
import re
import csv
import logging
from typing import Any, Dict, List, Optional

from modules.bench.harness import BenchReport

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['query_id', 'engine', 'result_count', 'wall_ms_median', 'plan_self_joins',
               'runtime_same_table_probes']
CHECK_COLUMNS = ['oracle_count', 'error']

REPORT_TEMPLATE_NAME = 'bench_report.md'


class ReportGenerator:
    """
    Renders benchmark reports.
    """

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Initialize the report generator.

        Args:
            config: Configuration dictionary
        """
        self.config = config or {}
        self.templates_dir = self.config.get('templates_dir', os.path.join('data', 'templates'))

    def write_csv(self, report: BenchReport, path: str):
        """
        Write one CSV row per (query, engine).

        The oracle and error columns are added when any row carries them.

        Args:
            report: Benchmark report
            path: Output path
        """
        columns = list(CSV_COLUMNS)
        if any(r.oracle_count is not None or r.error for r in report.rows):
            columns += CHECK_COLUMNS
        _ensure_parent(path)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=columns, extrasaction='ignore', lineterminator='\n')
            writer.writeheader()
            for row in report.as_dicts():
                writer.writerow({k: ('' if v is None else v) for k, v in row.items()})
        logger.info(f"Wrote CSV report with {len(report.rows)} rows to {path}")

    def render_markdown(self, report: BenchReport) -> str:
        """
        Render the markdown report: queries as rows, engines as column groups.

        Args:
            report: Benchmark report

        Returns:
            str: Markdown text
        """
        template = self._load_template(REPORT_TEMPLATE_NAME)
        template_vars = self._prepare_template_vars(report)
        return self._process_template(template, template_vars)

    def write_markdown(self, report: BenchReport, path: str):
        """Render the markdown report into a file."""
        _ensure_parent(path)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(self.render_markdown(report))
        logger.info(f"Wrote markdown report to {path}")

    def write(self, report: BenchReport, path: str):
        """Write CSV or markdown depending on the file extension."""
        if path.lower().endswith('.md'):
            self.write_markdown(report, path)
        else:
            self.write_csv(report, path)

    def _load_template(self, template_name: str) -> str:
        path = os.path.join(self.templates_dir, template_name)
        if os.path.exists(path):
            with open(path, 'r', encoding='utf-8') as f:
                return f.read()
        logger.debug(f"Template {path} not found, using the built-in report template")
        return DEFAULT_REPORT_TEMPLATE

    def _prepare_template_vars(self, report: BenchReport) -> Dict[str, str]:
        engines = report.engines
        template_vars = {key: str(value) for key, value in report.metadata.items()}

        header = ['Query', 'Patterns']
        for engine in engines:
            header += [f"{engine} ms", f"{engine} self-joins"]
        header.append('Results')
        lines = [_md_row(header), _md_row(['---'] * len(header))]
        for query_id in report.query_ids:
            cells = [query_id]
            counts = []
            for engine in engines:
                row = report.row(query_id, engine)
                if len(cells) == 1:
                    cells.append(str(row.pattern_count if row else ''))
                if row is None or row.error:
                    cells += ['error', '-']
                    continue
                cells += [f"{row.wall_ms_median:.3f}", str(row.plan_self_joins)]
                counts.append(row.result_count)
            cells.append('/'.join(str(c) for c in dict.fromkeys(counts)) or '-')
            lines.append(_md_row(cells))
        template_vars['results_table'] = '\n'.join(lines)

        totals = [_md_row(['Engine', 'Total self-joins', 'Reduction vs single']),
                  _md_row(['---'] * 3)]
        for engine in engines:
            reduction = report.reduction(engine)
            totals.append(_md_row([engine, str(report.total_self_joins(engine)),
                                   '-' if reduction is None else f"{reduction:.1f}%"]))
        template_vars['totals_table'] = '\n'.join(totals)

        errors = [f"- {r.query_id} on {r.engine}: {r.error}" for r in report.rows if r.error]
        template_vars['errors'] = '\n'.join(errors)
        mismatches = [f"- {r.query_id} on {r.engine}: {r.result_count} rows, oracle {r.oracle_count}"
                      for r in report.rows
                      if r.oracle_count is not None and not r.error and r.oracle_count != r.result_count]
        template_vars['mismatches'] = '\n'.join(mismatches)
        return template_vars

    def _process_template(self, template: str, template_vars: Dict[str, str]) -> str:
        """
        Process a template by substituting variables.

        Args:
            template: Template content
            template_vars: Variables to substitute

        Returns:
            str: Processed template
        """
        result = template
        for var in re.findall(r'\${([^}]+)}', template):
            result = result.replace(f"${{{var}}}", str(template_vars.get(var) or ''))

        result = self._process_conditionals(result, template_vars)

        # Collapse runs of blank lines left by empty blocks
        return re.sub(r'\n{3,}', '\n\n', result)

    def _process_conditionals(self, template: str, template_vars: Dict[str, str]) -> str:
        """
        Keep [if:var]...[endif] blocks whose variable is set and non-empty.

        Args:
            template: Template content
            template_vars: Variables to check

        Returns:
            str: Processed template
        """
        pattern = r'\[if:([^\]]+)\](.*?)\[endif\]'

        def replace_conditional(match):
            return match.group(2) if template_vars.get(match.group(1)) else ''

        result = template
        while re.search(pattern, result, re.DOTALL):
            result = re.sub(pattern, replace_conditional, result, flags=re.DOTALL)
        return result


def _md_row(cells: List[str]) -> str:
    return '| ' + ' | '.join(cells) + ' |'


def _ensure_parent(path: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)


def emit_report(report: BenchReport, path: str, config: Optional[Dict[str, Any]] = None):
    """
    Write a report as CSV or markdown, chosen by the file extension.

    Args:
        report: Benchmark report
        path: Output path (.csv or .md)
        config: Configuration dictionary (for templates_dir)
    """
    ReportGenerator(config).write(report, path)


DEFAULT_REPORT_TEMPLATE = """# Benchmark report

[if:dataset]Dataset: ${dataset}
[endif]Triples: ${triple_count}
Subjects: ${subject_count}, predicates: ${predicate_count}, objects: ${object_count}
Repetitions: ${repetitions}

## Times (ms) and self-joins

${results_table}

## Self-joins per engine

${totals_table}
[if:mismatches]
## Oracle mismatches

${mismatches}
[endif][if:errors]
## Errors

${errors}
[endif]"""

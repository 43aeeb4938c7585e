import contextlib
import logging
from collections.abc import Iterator
from pathlib import Path
from typing import Any

import click
import pydantic

from src import invariants
from src.diagram import DiagramEditError, SpliceDiagram, ValidationError, seifert_example, validate
from src.dsl import ParseError, parse, serialize
from src.laurent import (
    ZERO,
    BinomialFactorization,
    LaurentPoly,
    NonExactDivisionError,
    PoleError,
    Zero,
    default_names,
    factored_expand,
    factored_resolve,
    render_factored,
    render_poly,
)
from src.linking import (
    LinkingData,
    SameVertexError,
    UnknownVertexError,
    is_algebraically_split,
    linking_number,
    linking_table,
)
from src.options import Options
from src.schema import ExpandedOut, FactoredOut, InvariantOut, LinkingOut, OutputEnvelope, digest
from src.verify import GeneratorConfig, Outcome, run_checks, run_suite, summarize

logger = logging.getLogger(__name__)

INVARIANTS = ("potential", "alexander", "conway", "fibered", "signs", "split")


class DomainError(click.ClickException):
    """Raised for invalid diagrams, bad arguments to a computation and failed checks."""

    exit_code = 1


class IndeterminateError(click.ClickException):
    """Raised when a requested result hits a pole or a non-exact expansion."""

    exit_code = 2


class SourceParseError(click.ClickException):
    """Raised when a diagram file cannot be parsed."""

    exit_code = 3


def _read(file: Path) -> str:
    raw = file.read_bytes()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        line = raw.count(b"\n", 0, e.start) + 1
        column = e.start - raw.rfind(b"\n", 0, e.start)
        raise SourceParseError(f"{file}:{line}:{column}: {e.reason} (byte 0x{raw[e.start]:02x})") from None


def _load(file: Path) -> tuple[str, SpliceDiagram]:
    text = _read(file)
    try:
        d = parse(text)
    except ParseError as e:
        raise SourceParseError(f"{file}:{e.line}:{e.column}: {e.message}") from None
    try:
        validate(d)
    except ValidationError as e:
        raise DomainError(f"{file}: {e}") from None
    logger.info(f"Loaded {file} with {len(d.vertices)} vertices and {d.n_components} components")
    return text, d


def _names(nvars: int) -> tuple[str, ...]:
    return ("t",) if nvars == 1 else default_names(nvars)


def _polynomial_result(name: str, p: LaurentPoly | Zero) -> InvariantOut:
    if p is ZERO:
        return InvariantOut(name=name, status="zero", rendered="0")
    rendered = render_poly(p, _names(p.nvars))
    return InvariantOut(name=name, status="ok", rendered=rendered, expanded=ExpandedOut.from_poly(p))


def _factored_result(name: str, f: BinomialFactorization) -> InvariantOut:
    resolved = factored_resolve(f)
    if resolved is ZERO:
        return InvariantOut(name=name, status="zero", rendered="0")
    return InvariantOut(
        name=name,
        status="ok",
        rendered=render_factored(resolved, _names(resolved.nvars)),
        factored=FactoredOut.from_factorization(resolved),
    )


def _compute(name: str, d: SpliceDiagram, data: LinkingData, expand: bool) -> InvariantOut:
    match name:
        case "potential":
            raw = invariants.potential_factors(d, data)
            return _polynomial_result(name, factored_expand(raw)) if expand else _factored_result(name, raw)
        case "alexander":
            return _polynomial_result(name, invariants.alexander_polynomial(d, data))
        case "conway":
            if expand:
                return _polynomial_result(name, invariants.conway_polynomial(d, data))
            return _factored_result(name, invariants.conway_factors(d, data))
        case "fibered":
            fibered = invariants.is_fibered(d, data)
            return InvariantOut(name=name, status="ok", rendered="yes" if fibered else "no", flag=fibered)
        case "signs":
            counts = invariants.sign_counts(d, data)
            signs = {"k_minus": counts.k_minus, "j_minus": counts.j_minus}
            rendered = f"k_minus={counts.k_minus} j_minus={counts.j_minus}"
            if invariants.is_fibered(d, data):
                signs["det_sign"] = invariants.seifert_determinant_sign(d, data)
                signs["milnor_parity"] = invariants.enhanced_milnor_parity(d, data)
                rendered += f" det(-A)={signs['det_sign']:+d} milnor_parity={signs['milnor_parity']}"
            return InvariantOut(name=name, status="ok", rendered=rendered, signs=signs)
        case "split":
            result = is_algebraically_split(d, data)
            witness = sorted(result.witness) if result.witness else None
            rendered = f"yes {{{', '.join(map(str, witness))}}}" if witness else "no"
            return InvariantOut(name=name, status="ok", rendered=rendered, flag=result.split, witness=witness)
    raise ValueError(f"Unknown invariant {name}")


def _indeterminate(name: str, e: Exception) -> InvariantOut:
    logger.warning(f"Invariant `{name}` is indeterminate: {e}")
    return InvariantOut(name=name, status="indeterminate", rendered="INDETERMINATE", detail=str(e))


@contextlib.contextmanager
def _usage_errors_exit_one() -> Iterator[None]:
    try:
        yield
    except click.UsageError as e:
        e.exit_code = DomainError.exit_code
        raise


class SpliceGroup(click.Group):
    """A click group whose usage errors exit with 1; exit code 2 is reserved for indeterminate results."""

    def make_context(
        self, info_name: str | None, args: list[str], parent: click.Context | None = None, **extra: Any
    ) -> click.Context:
        with _usage_errors_exit_one():
            ctx = super().make_context(info_name, args, parent, **extra)
        return ctx

    def invoke(self, ctx: click.Context) -> Any:
        with _usage_errors_exit_one():
            result = super().invoke(ctx)
        return result


@click.group(cls=SpliceGroup)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Log level for messages on stderr. Defaults to SPLICE_LOG_LEVEL.",
)
def cli(log_level: str | None) -> None:
    """Link invariants of graph links from splice diagrams."""
    if log_level:
        logging.getLogger().setLevel(log_level.upper())


@cli.command(name="validate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def validate_command(file: Path) -> None:
    """Parse and validate a diagram file."""
    _, d = _load(file)
    click.echo(f"ok: {len(d.vertices)} vertices, {d.n_components} components")


@cli.command(name="invariants")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--potential", is_flag=True, help="Conway potential function.")
@click.option("--alexander", is_flag=True, help="Alexander polynomial up to units.")
@click.option("--conway", is_flag=True, help="One-variable Conway polynomial.")
@click.option("--fibered", is_flag=True, help="Whether the link is fibered.")
@click.option("--signs", is_flag=True, help="Sign counts, determinant sign and Milnor parity.")
@click.option("--split", is_flag=True, help="Whether the link is algebraically split.")
@click.option("--expand", is_flag=True, help="Expand factored results into Laurent polynomials.")
@click.option("--json", "as_json", is_flag=True, help="Print the JSON envelope.")
def invariants_command(file: Path, expand: bool, as_json: bool, **flags: bool) -> None:
    """Compute link invariants of a diagram. Without invariant flags, everything is computed."""
    text, d = _load(file)
    requested = [name for name in INVARIANTS if flags[name]] or list(INVARIANTS)
    data = linking_table(d)

    results = []
    for name in requested:
        try:
            results.append(_compute(name, d, data, expand))
        except (PoleError, NonExactDivisionError) as e:
            results.append(_indeterminate(name, e))

    if as_json:
        envelope = OutputEnvelope(
            version=Options.get().version,
            input_digest=digest(text),
            requested=requested,
            results=results,
            diagnostics=[f"{r.name}: {r.detail}" for r in results if r.status == "indeterminate"],
        )
        click.echo(envelope.model_dump_json(indent=2))
    elif len(results) == 1:
        click.echo(results[0].rendered)
    else:
        for result in results:
            click.echo(f"{result.name}: {result.rendered}")

    indeterminate = [result.name for result in results if result.status == "indeterminate"]
    if indeterminate:
        raise IndeterminateError(f"Indeterminate: {', '.join(indeterminate)}")


@cli.command(name="linking")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--pair", nargs=2, type=str, help="Linking number of two vertices.")
@click.option("--json", "as_json", is_flag=True, help="Print the JSON envelope.")
def linking_command(file: Path, pair: tuple[str, str] | None, as_json: bool) -> None:
    """Print the linking table of a diagram, or the linking number of one pair."""
    text, d = _load(file)
    if pair:
        try:
            value = linking_number(d, *pair)
        except (UnknownVertexError, SameVertexError) as e:
            raise DomainError(str(e)) from None
        click.echo(str(value))
        return

    table = LinkingOut.from_data(linking_table(d))
    if as_json:
        envelope = OutputEnvelope(version=Options.get().version, input_digest=digest(text), linking=table)
        click.echo(envelope.model_dump_json(indent=2))
        return
    for entry in table.pairs + table.vertices:
        click.echo(f"lk({entry.first}, {entry.second}) = {entry.value}")
    for vertex, total in table.totals.items():
        click.echo(f"l({vertex}) = {total}")


@cli.command(name="check")
@click.argument("file", required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--random", "count", type=click.IntRange(min=0), help="Check this many random diagrams.")
@click.option("--seed", type=int, help="Seed for random diagrams. Defaults to SPLICE_SEED.")
@click.option("--max-vertices", type=click.IntRange(min=2), default=12, show_default=True)
@click.option("--max-components", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--max-weight", type=click.IntRange(min=1), default=7, show_default=True)
@click.option("--zero-prob", type=click.FloatRange(0, 1), default=0.1, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), help="Worker processes. Defaults to SPLICE_WORKERS.")
@click.option("--json", "as_json", is_flag=True, help="Print the JSON envelope.")
def check_command(
    file: Path | None,
    count: int | None,
    seed: int | None,
    max_vertices: int,
    max_components: int,
    max_weight: int,
    zero_prob: float,
    workers: int | None,
    as_json: bool,
) -> None:
    """Run the identity checks on a diagram file or on random diagrams."""
    if (file is None) == (count is None):
        raise click.UsageError("Pass either FILE or --random COUNT.")

    if file is not None:
        text, d = _load(file)
        reports = run_checks(d)
        input_digest = digest(text)
    else:
        options = Options.get()
        try:
            cfg = GeneratorConfig(
                max_vertices=max_vertices,
                max_components=max_components,
                max_weight=max_weight,
                zero_prob=zero_prob,
                seed=options.seed if seed is None else seed,
            )
        except pydantic.ValidationError as e:
            raise DomainError(str(e)) from None
        reports = run_suite(cfg, count or 0, workers=workers or options.workers)
        input_digest = digest(cfg.model_dump_json())

    counts = summarize(reports)
    if as_json:
        envelope = OutputEnvelope(
            version=Options.get().version,
            input_digest=input_digest,
            reports=reports,
            summary={outcome.value: counts[outcome] for outcome in Outcome},
            diagnostics=[f"{r.line()}: {r.note}" for r in reports if r.outcome is Outcome.INDET],
        )
        click.echo(envelope.model_dump_json(indent=2))
    else:
        for report in reports:
            click.echo(report.line())
            if report.outcome is Outcome.FAIL:
                click.echo(f"  expected: {report.expected}\n  actual:   {report.actual}")
        click.echo(" ".join(f"{outcome.value.lower()}={counts[outcome]}" for outcome in Outcome))

    if counts[Outcome.FAIL]:
        raise DomainError(f"{counts[Outcome.FAIL]} identity checks failed")


def _parse_alphas(ctx: click.Context, param: click.Parameter, value: str) -> list[int]:
    try:
        return [int(part) for part in value.split(",")]
    except ValueError:
        raise click.BadParameter("expected a comma separated list of integers") from None


@cli.command(name="example")
@click.option("--alphas", required=True, callback=_parse_alphas, help="Node weights, e.g. 1,2,3.")
@click.option("--arrows", type=int, default=1, show_default=True, help="Number of edges ending in arrowheads.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Write to this file instead of stdout.")
def example_command(alphas: list[int], arrows: int, out: Path | None) -> None:
    """Emit the one-node diagram with the given weights and arrowheads."""
    try:
        d = seifert_example(alphas, arrows)
    except (DiagramEditError, ValidationError) as e:
        raise DomainError(str(e)) from None
    source = serialize(d)
    if out is None:
        click.echo(source, nl=False)
    else:
        out.write_text(source, encoding="utf-8")
        logger.info(f"Wrote example diagram to {out}")


def main() -> None:
    logging.basicConfig(level=Options.get().log_level)
    cli()


if __name__ == "__main__":
    main()

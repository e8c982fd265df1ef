"""Command-line interface.

Subcommands cover each pipeline stage (``ingest`` .. ``density``), synthetic
world generation (``world``), score comparison (``compare``) and the full
pipeline (``run``). All numeric output is full round-trip precision. Exit
code is 0 on success; on failure a stage-tagged error line goes to stderr and
the exit code is nonzero.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from ._io import write_matrix, write_rows
from .alphabet import generate_nested_world, generate_random_world, world_to_incidence, write_world
from .errors import ComplexityError
from .incidence import (
    binarize,
    compute_rca,
    prune_degenerate,
    write_incidence,
    write_specialization,
)
from .ingest import drop_empty_margins, left_tail_filter, open_text, parse_long_records, pivot_to_matrix
from .pipeline import (
    EMIT_CHOICES,
    PipelineConfig,
    compare_vectors,
    load_config_file,
    read_scores_file,
    run_pipeline,
)
from .relatedness import proximity, relatedness_density, write_density, write_proximity, write_proximity_edges
from .spectral import (
    eci,
    extensive_scores,
    largest_component,
    method_of_reflections,
    pci,
    write_eigensolution,
    write_scores,
)


def _fail(err: ComplexityError) -> None:
    stage = err.stage or "unknown"
    click.echo(f"error [{stage}] {err}", err=True)
    sys.exit(1)


def _single_char(ctx, param, value):
    if value == "\\t":
        return "\t"
    if value is not None and len(value) != 1:
        raise click.BadParameter("must be a single character ('\\t' for tab)")
    return value


def _input_options(fn):
    fn = click.option("--input", "input_path", required=True, type=click.Path(exists=True, path_type=Path), help="Long-format input file (.gz accepted).")(fn)
    fn = click.option("--delimiter", default=",", show_default=True, callback=_single_char, help="Field delimiter.")(fn)
    fn = click.option("--min-location-total", default=0.0, show_default=True, help="Left-tail cut: minimum location total output.")(fn)
    fn = click.option("--min-activity-total", default=0.0, show_default=True, help="Left-tail cut: minimum activity total output.")(fn)
    fn = click.option("--rca-threshold", default=1.0, show_default=True, help="Specialization threshold for the binary matrix.")(fn)
    fn = click.option("--out-dir", required=True, type=click.Path(path_type=Path), help="Output directory.")(fn)
    return fn


def _load_matrix(input_path, delimiter, min_location_total, min_activity_total):
    with open_text(input_path) as fh:
        records = parse_long_records(fh, delimiter)
    matrix = pivot_to_matrix(records)
    matrix = left_tail_filter(matrix, min_location_total, min_activity_total)
    return drop_empty_margins(matrix)


def _load_final(input_path, delimiter, min_location_total, min_activity_total, rca_threshold):
    """Raw input through RCA, binarization, pruning and component restriction."""
    matrix = _load_matrix(input_path, delimiter, min_location_total, min_activity_total)
    pruned, _ = prune_degenerate(binarize(compute_rca(matrix), rca_threshold))
    final, _ = largest_component(pruned)
    return final


@click.group()
def main():
    """Eigenvector-based complexity indices from location-activity data."""


@main.command()
@_input_options
def ingest(input_path, delimiter, min_location_total, min_activity_total, rca_threshold, out_dir):
    """Parse, aggregate and size-filter the input into an output matrix."""
    try:
        matrix = _load_matrix(input_path, delimiter, min_location_total, min_activity_total)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "output_matrix.csv"
        write_matrix(path, matrix.values, matrix.location_labels, matrix.activity_labels, delimiter)
        click.echo(f"wrote {path}")
    except ComplexityError as err:
        _fail(err)


@main.command()
@_input_options
def rca(input_path, delimiter, min_location_total, min_activity_total, rca_threshold, out_dir):
    """Write the specialization (RCA) matrix."""
    try:
        matrix = _load_matrix(input_path, delimiter, min_location_total, min_activity_total)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "rca.csv"
        write_specialization(path, compute_rca(matrix), delimiter)
        click.echo(f"wrote {path}")
    except ComplexityError as err:
        _fail(err)


@main.command()
@_input_options
def incidence(input_path, delimiter, min_location_total, min_activity_total, rca_threshold, out_dir):
    """Write the pruned binary incidence matrix with diversity and ubiquity."""
    try:
        matrix = _load_matrix(input_path, delimiter, min_location_total, min_activity_total)
        pruned, _ = prune_degenerate(binarize(compute_rca(matrix), rca_threshold))
        out_dir.mkdir(parents=True, exist_ok=True)
        write_incidence(out_dir / "incidence.csv", pruned, delimiter)
        write_rows(out_dir / "diversity.csv", ("label", "value"),
                   zip(pruned.location_labels, pruned.diversity), delimiter)
        write_rows(out_dir / "ubiquity.csv", ("label", "value"),
                   zip(pruned.activity_labels, pruned.ubiquity), delimiter)
        click.echo(f"wrote {out_dir / 'incidence.csv'}")
    except ComplexityError as err:
        _fail(err)


def _score_command(name, compute):
    @main.command(name=name)
    @_input_options
    def command(input_path, delimiter, min_location_total, min_activity_total, rca_threshold, out_dir):
        try:
            final = _load_final(input_path, delimiter, min_location_total, min_activity_total, rca_threshold)
            out_dir.mkdir(parents=True, exist_ok=True)
            path = out_dir / f"{name}.csv"
            write_scores(path, compute(final), delimiter)
            click.echo(f"wrote {path}")
        except ComplexityError as err:
            _fail(err)

    command.__doc__ = f"Write {name.upper()} scores (label, raw, standardized, rank)."
    return command


_score_command("eci", eci)
_score_command("pci", pci)


@main.command()
@_input_options
def extensive(input_path, delimiter, min_location_total, min_activity_total, rca_threshold, out_dir):
    """Write the first and second extensive eigenvectors and the spectrum."""
    try:
        final = _load_final(input_path, delimiter, min_location_total, min_activity_total, rca_threshold)
        out_dir.mkdir(parents=True, exist_ok=True)
        first, second, solution = extensive_scores(final)
        write_scores(out_dir / "extensive_first.csv", first, delimiter)
        write_scores(out_dir / "extensive_second.csv", second, delimiter)
        write_eigensolution(out_dir / "extensive_eigenvalues.csv", solution, delimiter)
        click.echo(f"wrote {out_dir / 'extensive_first.csv'}")
    except ComplexityError as err:
        _fail(err)


@main.command()
@_input_options
@click.option("--iterations", default=20, show_default=True, help="Number of reflection updates.")
def reflections(input_path, delimiter, min_location_total, min_activity_total, rca_threshold, out_dir, iterations):
    """Write the method-of-reflections trajectory (raw and z-scored)."""
    try:
        final = _load_final(input_path, delimiter, min_location_total, min_activity_total, rca_threshold)
        out_dir.mkdir(parents=True, exist_ok=True)
        trajectory = method_of_reflections(final, iterations)
        for stem, labels, raw, z in (
            ("reflections_locations", trajectory.location_labels, trajectory.kc, trajectory.kc_zscored),
            ("reflections_activities", trajectory.activity_labels, trajectory.kp, trajectory.kp_zscored),
        ):
            rows = (
                (n, label, raw[n, i], z[n, i])
                for n in range(raw.shape[0])
                for i, label in enumerate(labels)
            )
            write_rows(out_dir / f"{stem}.csv", ("iteration", "label", "value", "zscore"), rows, delimiter)
        click.echo(f"wrote {out_dir / 'reflections_locations.csv'}")
    except ComplexityError as err:
        _fail(err)


@main.command(name="proximity")
@_input_options
@click.option("--min-phi", default=0.0, show_default=True, help="Minimum proximity for the edge list.")
def proximity_command(input_path, delimiter, min_location_total, min_activity_total, rca_threshold, out_dir, min_phi):
    """Write the activity proximity matrix and thresholded edge list."""
    try:
        final = _load_final(input_path, delimiter, min_location_total, min_activity_total, rca_threshold)
        out_dir.mkdir(parents=True, exist_ok=True)
        phi = proximity(final)
        write_proximity(out_dir / "proximity_matrix.csv", phi, delimiter)
        write_proximity_edges(out_dir / "proximity_edges.csv", phi, min_phi, delimiter)
        click.echo(f"wrote {out_dir / 'proximity_matrix.csv'}")
    except ComplexityError as err:
        _fail(err)


@main.command()
@_input_options
def density(input_path, delimiter, min_location_total, min_activity_total, rca_threshold, out_dir):
    """Write the relatedness density matrix."""
    try:
        final = _load_final(input_path, delimiter, min_location_total, min_activity_total, rca_threshold)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_density(out_dir / "density.csv", relatedness_density(final, proximity(final)), delimiter)
        click.echo(f"wrote {out_dir / 'density.csv'}")
    except ComplexityError as err:
        _fail(err)


@main.command()
@click.option("--kind", type=click.Choice(["nested", "random"]), default="nested", show_default=True)
@click.option("--locations", default=10, show_default=True)
@click.option("--activities", default=20, show_default=True)
@click.option("--letters-per-location", default=8, show_default=True)
@click.option("--letters-per-word", default=3, show_default=True)
@click.option("--num-letters", default=26, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--delimiter", default=",", show_default=True, callback=_single_char)
@click.option("--out-dir", required=True, type=click.Path(path_type=Path))
def world(kind, locations, activities, letters_per_location, letters_per_word, num_letters, seed, delimiter, out_dir):
    """Generate a synthetic alphabet economy and its incidence matrix."""
    try:
        if kind == "nested":
            generated = generate_nested_world(locations, activities, seed)
        else:
            generated = generate_random_world(
                locations, activities, letters_per_location, letters_per_word, seed, num_letters
            )
        out_dir.mkdir(parents=True, exist_ok=True)
        write_world(out_dir / "world.txt", generated)
        write_incidence(out_dir / "world_incidence.csv", world_to_incidence(generated), delimiter)
        click.echo(f"wrote {out_dir / 'world.txt'}")
    except ComplexityError as err:
        _fail(err)


@main.command()
@click.argument("file_a", type=click.Path(exists=True, path_type=Path))
@click.argument("file_b", type=click.Path(exists=True, path_type=Path))
@click.option("--delimiter", default=",", show_default=True, callback=_single_char)
@click.option("--column", default="standardized", show_default=True, help="Score column to compare.")
def compare(file_a, file_b, delimiter, column):
    """Correlate two score files over their shared labels."""
    try:
        a = read_scores_file(file_a, delimiter, column)
        b = read_scores_file(file_b, delimiter, column)
        report = compare_vectors(a, b, file_a.stem, file_b.stem)
        click.echo(f"n {report.n}")
        click.echo(f"pearson_r {report.pearson_r!r}")
        click.echo(f"r_squared {report.r_squared!r}")
        click.echo(f"spearman_rho {report.spearman_rho!r}")
    except ComplexityError as err:
        _fail(err)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path), help="key = value config file; flags win.")
@click.option("--input", "input_path", type=click.Path(path_type=Path))
@click.option("--delimiter", default=None, callback=_single_char)
@click.option("--min-location-total", type=float, default=None)
@click.option("--min-activity-total", type=float, default=None)
@click.option("--rca-threshold", type=float, default=None)
@click.option("--min-phi", type=float, default=None)
@click.option("--iterations", "reflections_iterations", type=int, default=None)
@click.option("--emit", default=None, help=f"Comma-separated subset of {','.join(EMIT_CHOICES)}.")
@click.option("--out-dir", type=click.Path(path_type=Path))
def run(config_path, **flags):
    """Run the full pipeline and write the configured artifact set."""
    options: dict = {}
    if config_path is not None:
        options.update(load_config_file(config_path))
    options.update({key: value for key, value in flags.items() if value is not None})
    if "input" in options:
        options["input_path"] = options.pop("input")
    if "emit" in options and isinstance(options["emit"], str):
        options["emit"] = tuple(part.strip() for part in options["emit"].split(",") if part.strip())
    if options.get("delimiter") == "\\t":
        options["delimiter"] = "\t"
    for key in ("min_location_total", "min_activity_total", "rca_threshold", "min_phi"):
        if key in options:
            options[key] = float(options[key])
    if "reflections_iterations" in options:
        options["reflections_iterations"] = int(options["reflections_iterations"])
    missing = {"input_path", "out_dir"} - set(options)
    if missing:
        click.echo(f"error [config] missing required options: {sorted(missing)}", err=True)
        sys.exit(2)
    try:
        cfg = PipelineConfig(**options)
    except (TypeError, ValueError) as err:
        click.echo(f"error [config] {err}", err=True)
        sys.exit(2)
    try:
        result = run_pipeline(cfg)
    except ComplexityError as err:
        _fail(err)
    else:
        for name in sorted(result.outputs):
            click.echo(f"wrote {result.outputs[name]}")


if __name__ == "__main__":
    main()

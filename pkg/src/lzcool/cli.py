"""Command line entry point: ``lzcool {trace,vsweep,grid,azcurve,optimize}``.

Every config key has a matching flag (``alpha_x`` -> ``--alpha-x``);
``--cutoff`` sets both bath cutoffs. Flags override values read with
``--config``.

Exit codes: 0 success, 1 validation error, 2 integration failure,
3 I/O error.
"""
import argparse
import logging
import sys

from . import experiments, output
from .dynamics import IntegrationError
from .experiments import ConfigError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INTEGRATION = 2
EXIT_IO = 3

log = logging.getLogger("lzcool")

_HELP = {
    "trace": "p_G(t) and Bloch vector for one or more alpha_x values",
    "vsweep": "final p_G versus sweep velocity and temperature",
    "grid": "final p_G on an (alpha_x, alpha_z) grid",
    "azcurve": "final p_G versus alpha_z at alpha_x = 0, with its minimum",
    "optimize": "locate the optimal velocity or the alpha_z minimum",
}


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _ArgumentParser(prog="lzcool", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in experiments.KINDS:
        p = sub.add_parser(kind, help=_HELP[kind], description=_HELP[kind])
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--cutoff", help="cutoff of both baths (units of the gap)")
        p.add_argument("--print-config", action="store_true",
                       help="print the resolved config and exit")
        for name in experiments._FIELDS:
            if name == "kind":
                continue
            p.add_argument("--" + name.replace("_", "-"), dest=name, default=None,
                           metavar="VALUE")
    return parser


def resolve_config(args):
    overrides = {}
    if args.cutoff is not None:
        c = experiments.parse_value("cutoff_x", args.cutoff)
        overrides["cutoff_x"] = overrides["cutoff_z"] = c
    for name in experiments._FIELDS:
        value = getattr(args, name, None)
        if name != "kind" and value is not None:
            overrides[name] = experiments.parse_value(name, value)
    overrides["kind"] = args.kind
    if args.config:
        return experiments.load_config(args.config, **overrides)
    kind = overrides.pop("kind")
    return experiments.ExperimentConfig.for_kind(kind, **overrides).validate()


def _summary(table):
    for note in table.notes:
        if note[0] == "scan":
            continue
        key, value = note
        print(f"# {key} = {output.format_number(value)}", file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"lzcool: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"lzcool: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.print_config:
        sys.stdout.write(experiments.serialize_config(cfg))
        return EXIT_OK

    try:
        table = experiments.run(cfg)
    except ConfigError as exc:
        print(f"lzcool: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except IntegrationError as exc:
        print(f"lzcool: integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION

    try:
        if cfg.format == "svg":
            output.emit_svg(table, cfg.out)
        else:
            output.emit_csv(table, cfg.out)
        if cfg.figure:
            from .plotting import render_figure
            render_figure(table, cfg.figure)
    except OSError as exc:
        print(f"lzcool: {exc}", file=sys.stderr)
        return EXIT_IO
    _summary(table)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

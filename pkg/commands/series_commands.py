"""Commands that read one series document and report on it."""
import argparse
from pathlib import Path
from typing import Any, Dict, List, Mapping

from algebra.gaussian import format_gaussian
from commands import Command
from commands.documents import (
    decode_even,
    decode_manifold,
    decode_series,
    encode_even,
    encode_manifold,
    encode_poly,
    encode_series,
    encode_truncated,
    loads,
)
from core.context import CommandContext
from core.errors import DocumentError, DonaldsonError, FlagViolationError
from invariants.insertion import (
    apply_even,
    finite_type_order,
    finite_type_order_closed_form,
    is_sst_shape,
    isolating_element,
)
from invariants.series import (
    DonaldsonSeries,
    basic_classes,
    check_pair_structure,
    check_symmetry_identity,
    expand,
    min_genus,
    to_km_form,
    validate_flags,
)
from lattice.forms import CohClass, d0_mod4


def parse_coords(text: str) -> List[int]:
    """argparse type for "1,-1,0" style class coordinates."""
    text = text.strip().strip("[]")
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def input_series(context: CommandContext) -> DonaldsonSeries:
    if context.document is None:
        raise DocumentError(f"{context.command} needs an input series document")
    return decode_series(context.document)


def add_cutoff_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cutoff", type=int, help="Total degree cutoff in t (default: defaults.cutoff)")
    parser.add_argument(
        "--lambda-cutoff", type=int, help="Separate cutoff in lam (default: defaults.lambda_cutoff)"
    )


def cutoffs(context: CommandContext) -> tuple:
    return (
        context.option("cutoff", "defaults.cutoff", 8),
        context.option("lambda_cutoff", "defaults.lambda_cutoff", 3),
    )


class ExpandCommand(Command):
    name = "expand"
    help = "Expand a series into its truncated generating function"

    def add_arguments(self, parser):
        add_cutoff_arguments(parser)

    def run(self, context):
        S = input_series(context)
        cutoff, lambda_cutoff = cutoffs(context)
        G = expand(S, cutoff, lambda_cutoff)
        return encode_truncated(G, header=encode_manifold(S.manifold, S.w, S.zword))


class BasicClassesCommand(Command):
    name = "basic-classes"
    help = "List the basic classes with their polynomials"

    def run(self, context):
        S = input_series(context)
        return {
            "basic_classes": [{"K": K.to_list(), "poly": encode_poly(p)} for K, p in basic_classes(S)]
        }


class OrderCommand(Command):
    name = "order"
    help = "Finite type order, by repeated (x^2 - 4) insertion"

    def run(self, context):
        S = input_series(context)
        return {
            "order": finite_type_order(S),
            "closed_form": finite_type_order_closed_form(S),
            "sst_shape": is_sst_shape(S),
        }


class MinGenusCommand(Command):
    name = "min-genus"
    help = "Adjunction lower bound on the genus of an embedded surface"

    def add_arguments(self, parser):
        parser.add_argument("--surface", type=parse_coords, required=True, help="Homology class, e.g. 1,0")

    def run(self, context):
        S = input_series(context)
        surf = CohClass.of(context.options["surface"])
        return {"surface": surf.to_list(), "min_genus": min_genus(S, surf)}


class SymmetryCheckCommand(Command):
    name = "symmetry-check"
    help = "Validate flags, pair structure and the G(it, -lam) identity"

    def add_arguments(self, parser):
        add_cutoff_arguments(parser)

    def run(self, context):
        if context.document is None:
            raise DocumentError("symmetry-check needs an input series document")
        S = decode_series(context.document, validate=False)
        cutoff, lambda_cutoff = cutoffs(context)

        report: Dict[str, Any] = {}
        try:
            validate_flags(S)
            report["flags"] = {"passed": True}
        except FlagViolationError as e:
            report["flags"] = {"passed": False, "error": e.to_dict()}
        report["pair_structure"] = check_pair_structure(S).to_dict()
        try:
            identity = check_symmetry_identity(S, cutoff, lambda_cutoff)
            report["symmetry_identity"] = {"passed": identity, "cutoff": cutoff, "lambda_cutoff": lambda_cutoff}
        except DonaldsonError as e:
            report["symmetry_identity"] = {"passed": False, "error": e.to_dict()}
        report["passed"] = all(part["passed"] for part in report.values())
        return report

    def exit_code(self, output):
        return 0 if output["passed"] else 3


class KmFormCommand(Command):
    name = "km-form"
    help = "Kronheimer-Mrowka (K, a) pairs of a simple type series"

    def run(self, context):
        S = input_series(context)
        return {"km": [{"K": K.to_list(), "a": format_gaussian(a)} for K, a in to_km_form(S)]}


class D0Command(Command):
    name = "d0"
    help = "Formal dimension d0 and (d0 - d) mod 4"

    def run(self, context):
        if context.document is None:
            raise DocumentError("d0 needs an input document")
        manifold, w, zword = decode_manifold(context.document)
        return d0_mod4(manifold, w, zword.deg2z).to_dict()


class IsolateCommand(Command):
    name = "isolate"
    help = "Even element reducing the series to a single basic class"

    def add_arguments(self, parser):
        parser.add_argument("--class", dest="K", type=parse_coords, required=True, help="Basic class K")

    def run(self, context):
        S = input_series(context)
        element = isolating_element(S, S.lattice.check(CohClass.of(context.options["K"]), "K"))
        return {"element": encode_even(element), "result": encode_series(apply_even(S, element))}


class ApplyEvenCommand(Command):
    name = "apply-even"
    help = "Apply an even element (a document, or the output of isolate) to a series"

    def add_arguments(self, parser):
        parser.add_argument("--element", type=Path, required=True, help="Even element JSON file")

    def run(self, context):
        S = input_series(context)
        path = Path(context.options["element"])
        try:
            doc = loads(path.read_text())
        except OSError as e:
            raise DocumentError(f"cannot read {path}: {e.strerror}") from e
        if isinstance(doc, Mapping) and "element" in doc:
            doc = doc["element"]
        element = decode_even(doc)
        return {"element": encode_even(element), "result": encode_series(apply_even(S, element))}


SERIES_COMMANDS = (
    ExpandCommand,
    BasicClassesCommand,
    OrderCommand,
    MinGenusCommand,
    SymmetryCheckCommand,
    KmFormCommand,
    D0Command,
    IsolateCommand,
    ApplyEvenCommand,
)

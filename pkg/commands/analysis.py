"""Structure fitting, Floer annihilators and the fixture catalog."""
from typing import Any, Dict

from commands import Command
from commands.documents import decode_series, decode_truncated_with_manifold, encode_series
from commands.series_commands import parse_coords
from core.errors import DocumentError, DonaldsonValidationError
from fitting.structfit import recover_structure
from floer.hff import (
    annihilators,
    check_annihilated,
    relation_annihilator,
    spectrum,
    sst_annihilator,
)
from invariants.insertion import finite_type_order, is_sst_shape, km_insertion
from invariants.series import basic_classes, expand_restricted
from lattice.forms import CohClass, pairing


class FitCommand(Command):
    name = "fit"
    help = "Recover the structured series from a truncated expansion"

    def add_arguments(self, parser):
        parser.add_argument(
            "--bound",
            type=parse_coords,
            help="Bound on |K.e_j|: one value for all directions or one per direction",
        )
        parser.add_argument("--max-degree", type=int, help="Bound on the t-degree of each polynomial")
        parser.add_argument("--max-lambda-degree", type=int, help="Bound on the lam-degree of each polynomial")

    def run(self, context):
        if context.document is None:
            raise DocumentError("fit needs a truncated series document")
        G, manifold, w, zword = decode_truncated_with_manifold(context.document)
        bound = context.options.get("bound")
        if bound is None:
            bounds: Any = context.option("bound", "fit.bound", 3)
        else:
            bounds = bound[0] if len(bound) == 1 else bound
        S = recover_structure(
            G,
            manifold,
            w,
            bounds,
            max_degree=context.option("max_degree", "fit.max_degree", 0),
            max_lambda_degree=context.option("max_lambda_degree", "fit.max_lambda_degree", 0),
            zword=zword,
            dispatcher=context.dispatcher,
        )
        return {
            "series": encode_series(S),
            "residual": {"passed": True, "truncation": G.truncation.to_dict()},
        }


class AnnihilatorsCommand(Command):
    name = "annihilators"
    help = "Differential operators from the Floer eigenvalue structure"
    input_mode = "optional"

    def add_arguments(self, parser):
        parser.add_argument("--genus", type=int, help="Genus g of Sigma (default: hff.genus)")
        parser.add_argument("--mult", type=int, help="Nilpotency order N (default: hff.mult)")
        parser.add_argument("--dsigma", type=int, help="D.Sigma (default: hff.dsigma)")
        parser.add_argument("--surface", type=parse_coords, help="Sigma with Sigma^2 = 0, for checking a series")
        parser.add_argument("--direction", type=parse_coords, help="D for checking a series")
        parser.add_argument("--cutoff", type=int, help="Total cutoff in (t, s) for the check")
        parser.add_argument("--lambda-cutoff", type=int, help="Separate lam cutoff for the check")

    def run(self, context):
        g = context.option("genus", "hff.genus", 2)
        N = context.option("mult", "hff.mult", 1)

        checks = None
        if context.document is not None:
            S = decode_series(context.document)
            checks, dsigma = self._check(context, S, g, N)
        else:
            dsigma = context.option("dsigma", "hff.dsigma", 1)

        ops = annihilators(g, N, dsigma)
        output: Dict[str, Any] = {
            "genus": g,
            "mult": N,
            "dsigma": dsigma,
            "spectrum": spectrum(g, N).to_dict(),
            "annihilators": ops.to_dict(),
            "relations": {
                "plus": relation_annihilator(g, N, dsigma, "plus").to_dict(),
                "minus": relation_annihilator(g, N, dsigma, "minus").to_dict(),
            },
            "sst": sst_annihilator(g, dsigma).to_dict(),
        }
        if checks is not None:
            output["checks"] = checks
        return output

    def _check(self, context, S, g: int, N: int):
        if context.options.get("surface") is None or context.options.get("direction") is None:
            raise DonaldsonValidationError("checking a series needs --surface and --direction")
        lattice = S.lattice
        sigma = lattice.check(CohClass.of(context.options["surface"]), "surface")
        D = lattice.check(CohClass.of(context.options["direction"]), "direction")
        if lattice.square(sigma) != 0:
            raise DonaldsonValidationError(f"Sigma^2 = {lattice.square(sigma)}, expected 0")
        dsigma = pairing(lattice, D, sigma)

        op = annihilators(g, N, dsigma).combined
        cutoff = context.options.get("cutoff") or max(
            context.option("cutoff", "defaults.cutoff", 8), op.total_multiplicity("s")
        )
        lambda_cutoff = context.options.get("lambda_cutoff") or max(
            context.option("lambda_cutoff", "defaults.lambda_cutoff", 3), op.total_multiplicity("lam")
        )
        directions = {"t": D, "s": sigma}
        F = expand_restricted(S, directions, cutoff, lambda_cutoff)
        report: Dict[str, Any] = {
            "cutoff": cutoff,
            "lambda_cutoff": lambda_cutoff,
            "combined": check_annihilated(F, op),
        }
        if S.flags.claims_sst:
            simple = expand_restricted(km_insertion(S), directions, cutoff, 0)
            report["sst"] = check_annihilated(simple, sst_annihilator(g, dsigma))
        report["passed"] = all(v for k, v in report.items() if k in ("combined", "sst"))
        return report, dsigma

    def exit_code(self, output):
        checks = output.get("checks")
        return 3 if checks is not None and not checks["passed"] else 0


class CatalogCommand(Command):
    name = "catalog"
    help = "List built-in fixtures, or print one with --show NAME"
    input_mode = "none"

    def add_arguments(self, parser):
        parser.add_argument("--show", metavar="NAME", help="Print the series document of one fixture")

    def run(self, context):
        catalog = context.catalog
        if context.options.get("show"):
            return encode_series(catalog.get(context.options["show"]))

        entries = []
        for name in catalog.names():
            S = catalog.get(name)
            entries.append(
                {
                    "name": name,
                    "description": catalog.description(name),
                    "manifold": S.manifold.name,
                    "rank": S.rank,
                    "basic_classes": len(basic_classes(S)),
                    "order": finite_type_order(S),
                    "sst_shape": is_sst_shape(S),
                }
            )
        return {"fixtures": entries}


ANALYSIS_COMMANDS = (FitCommand, AnnihilatorsCommand, CatalogCommand)

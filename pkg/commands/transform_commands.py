"""Commands that map a series document to a new series document."""
from commands import Command
from commands.documents import encode_series
from commands.series_commands import input_series, parse_coords
from invariants.transforms import (
    BlowupVariant,
    blow_down_derivative,
    blow_up,
    connect_sum_s1s3,
    recolor,
    twist_by_even,
)
from lattice.forms import CohClass


class BlowupCommand(Command):
    name = "blowup"
    help = "Blow up a simple type series (cosh keeps w, sinh uses w + E)"

    def add_arguments(self, parser):
        parser.add_argument(
            "--variant",
            choices=[v.value for v in BlowupVariant],
            default=BlowupVariant.COSH.value,
            help="Blow-up formula (default: cosh)",
        )

    def run(self, context):
        return encode_series(blow_up(input_series(context), BlowupVariant(context.options["variant"])))


class BlowdownCommand(Command):
    name = "blowdown"
    help = "Blow down along E by the first derivative in t_E"

    def add_arguments(self, parser):
        parser.add_argument("--e-index", type=int, help="Index of E in the lattice basis (default: last)")

    def run(self, context):
        return encode_series(blow_down_derivative(input_series(context), context.options.get("e_index")))


class RecolorCommand(Command):
    name = "recolor"
    help = "Change w on a simple type series"

    def add_arguments(self, parser):
        parser.add_argument("--w", dest="w_new", type=parse_coords, required=True, help="New w, e.g. --w=0,1")

    def run(self, context):
        S = input_series(context)
        return encode_series(recolor(S, S.lattice.check(CohClass.of(context.options["w_new"]), "w")))


class TwistCommand(Command):
    name = "twist"
    help = "Replace w by w + 2 alpha, multiplying by (-1)^(alpha^2)"

    def add_arguments(self, parser):
        parser.add_argument("--alpha", type=parse_coords, required=True, help="Class alpha, e.g. 1,0")

    def run(self, context):
        S = input_series(context)
        return encode_series(twist_by_even(S, S.lattice.check(CohClass.of(context.options["alpha"]), "alpha")))


class SumS1S3Command(Command):
    name = "sum-s1s3"
    help = "Connected sum with S1xS3"

    def add_arguments(self, parser):
        parser.add_argument("--cycle", default="delta", help="Label of the new 1-cycle (default: delta)")

    def run(self, context):
        return encode_series(connect_sum_s1s3(input_series(context), context.options["cycle"]))


TRANSFORM_COMMANDS = (
    BlowupCommand,
    BlowdownCommand,
    RecolorCommand,
    TwistCommand,
    SumS1S3Command,
)

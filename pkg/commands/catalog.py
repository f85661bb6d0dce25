"""Built-in fixtures declared in config/fixtures/*.yaml.

A declaration carries a ``manifold`` header (same fields as a series document)
and exactly one of:

* ``km``: a list of {K, a} pairs in Kronheimer-Mrowka form,
* ``plus``: explicit Plus terms {K, poly}, symmetrized into both sectors,
* ``derive``: {from, transform, ...} applying a transform to another fixture,

or none of them for the zero series.
"""
from typing import Any, Dict, List, Mapping, Optional, Set

import structlog

from algebra.gaussian import parse_gaussian
from commands.documents import decode_manifold, decode_poly
from core.config_loader import ConfigLoader
from core.errors import DocumentError
from core.events import EventDispatcher, EventType
from invariants.series import (
    DonaldsonSeries,
    Sector,
    SeriesFlags,
    from_km_form,
    series_variables,
    symmetrize,
    validate_flags,
)
from invariants.transforms import BlowupVariant, blow_up, connect_sum_s1s3, recolor
from lattice.forms import CohClass, is_characteristic

logger = structlog.get_logger(__name__)

_SOURCES = ("km", "plus", "derive")


class FixtureCatalog:
    """Builds and memoizes fixture series by name."""

    def __init__(self, config_loader: ConfigLoader, dispatcher: Optional[EventDispatcher] = None):
        self.config_loader = config_loader
        self.dispatcher = dispatcher
        self._built: Dict[str, DonaldsonSeries] = {}

    def names(self) -> List[str]:
        return self.config_loader.list_fixtures()

    def description(self, name: str) -> str:
        return self._declaration(name).get("description", "")

    def get(self, name: str) -> DonaldsonSeries:
        """Series for a fixture name.

        Raises:
            DocumentError: Unknown fixture, malformed declaration or derive cycle
        """
        return self._build(name, set())

    def _declaration(self, name: str) -> Mapping[str, Any]:
        try:
            return self.config_loader.get_fixture_config(name)
        except KeyError:
            raise DocumentError(
                f"unknown fixture {name!r}", {"available": self.names()}
            ) from None

    def _build(self, name: str, visiting: Set[str]) -> DonaldsonSeries:
        if name in self._built:
            return self._built[name]
        if name in visiting:
            raise DocumentError(f"fixture {name!r} derives from itself")
        visiting.add(name)

        declaration = self._declaration(name)
        sources = [key for key in _SOURCES if key in declaration]
        if len(sources) > 1:
            raise DocumentError(f"fixture {name!r} mixes {sources}")

        if sources == ["derive"]:
            series = self._derive(name, declaration["derive"], visiting)
        else:
            series = self._from_header(name, declaration, sources[0] if sources else None)

        validate_flags(series)
        self._built[name] = series
        logger.debug("fixture_built", fixture=name, terms=len(series.terms))
        if self.dispatcher is not None:
            self.dispatcher.emit(EventType.FIXTURE_BUILT, source="catalog", fixture=name)
        return series

    def _from_header(self, name: str, declaration: Mapping[str, Any], source: Optional[str]) -> DonaldsonSeries:
        header = declaration.get("manifold")
        if not isinstance(header, Mapping):
            raise DocumentError(f"fixture {name!r} needs a manifold header")
        manifold, w, zword = decode_manifold(header)

        if source == "km":
            pairs = []
            for entry in declaration["km"]:
                K = manifold.lattice.check(CohClass.of(entry["K"]), "K")
                pairs.append((K, parse_gaussian(str(entry["a"]))))
            return from_km_form(pairs, manifold, w, zword)

        variables = series_variables(manifold.rank)
        terms = []
        for entry in declaration.get("plus", []):
            K = manifold.lattice.check(CohClass.of(entry["K"]), "K")
            terms.append((Sector.PLUS, K, decode_poly(entry["poly"], variables)))
        flags = SeriesFlags(
            claims_characteristic=all(is_characteristic(manifold.lattice, K) for _, K, _ in terms),
            claims_sst=all(p.is_constant() for _, _, p in terms),
        )
        series = DonaldsonSeries.build(manifold, w, terms, zword, flags)
        if declaration.get("symmetrize", True):
            series = symmetrize(series)
        return series

    def _derive(self, name: str, declaration: Mapping[str, Any], visiting: Set[str]) -> DonaldsonSeries:
        if not isinstance(declaration, Mapping) or not {"from", "transform"} <= set(declaration):
            raise DocumentError(f"fixture {name!r}: derive needs 'from' and 'transform'")
        base = self._build(declaration["from"], visiting)
        transform = declaration["transform"]

        if transform == "blowup":
            variant = declaration.get("variant", "cosh")
            if variant not in {v.value for v in BlowupVariant}:
                raise DocumentError(f"fixture {name!r}: unknown blow-up variant {variant!r}")
            derived = blow_up(base, BlowupVariant(variant))
        elif transform == "sum-s1s3":
            derived = connect_sum_s1s3(base, declaration.get("cycle", "delta"))
        elif transform == "recolor":
            if "w" not in declaration:
                raise DocumentError(f"fixture {name!r}: recolor needs 'w'")
            derived = recolor(base, base.lattice.check(CohClass.of(declaration["w"]), "w"))
        else:
            raise DocumentError(f"fixture {name!r}: unknown transform {transform!r}")

        if "name" in declaration:
            derived = derived.with_terms(
                derived.raw_terms(), derived.flags, manifold=derived.manifold.renamed(declaration["name"])
            )
        return derived

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional

from trackhom.config import FIXTURES_DIR, get_cache_dir, get_max_degree, get_max_generators
from trackhom.models.schemas import ComparisonReport, NerveReport, Report
from trackhom.services.bw import bw_cohomology, bw_comparison, natural_system_from_module
from trackhom.services.cache_service import CacheService
from trackhom.services.cat import FinCat, is_free
from trackhom.services.cohomology import (
    COMONAD,
    SO_BASE,
    SO_TOTAL,
    THEORIES,
    CochainBuilder,
    compute_H,
    free_shift_comparison,
    les_verify,
    theory_table,
    verify_ses_level,
)
from trackhom.services.coeff import constant_module
from trackhom.services.fixture_service import Fixture, parse_fixture, resolve_fixture_path
from trackhom.services.nerve import (
    category_nerve,
    const_cohomology,
    diag,
    double_nerve,
    export_sset,
    nerve_comparison,
)
from trackhom.services.resolution import ResolutionCache, evaluate_gate, finiteness_gate, resolution_report
from trackhom.services.zmod import FinAbGroup, iso_check

logger = logging.getLogger(__name__)

BW = "bw"
ALL = "all"


def _is_groupoid(category: FinCat) -> bool:
    for m, (src, tgt) in category.morphisms.items():
        if not any(
            category.compose(m, g) == category.identity(src) and category.compose(g, m) == category.identity(tgt)
            for g in category.hom(tgt, src)
        ):
            return False
    return True


def nerve_group(fixture: Fixture) -> FinAbGroup:
    """Constant coefficients for the classifying space: the fixture's constant group, else Z."""
    spec = fixture.doc.module
    if spec.kind == "constant":
        return FinAbGroup(tuple(spec.group))
    return FinAbGroup.free(1)


@dataclass
class Orchestrator:
    fixtures_dir: Path
    cache: Optional[CacheService]
    max_generators: int
    max_degree: int
    timing: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        cache_dir: Optional[Path] = None,
        max_generators: Optional[int] = None,
        max_degree: Optional[int] = None,
    ) -> "Orchestrator":
        cache_dir = cache_dir or get_cache_dir()
        return cls(
            fixtures_dir=FIXTURES_DIR,
            cache=CacheService(cache_dir) if cache_dir else None,
            max_generators=max_generators if max_generators is not None else get_max_generators(),
            max_degree=max_degree if max_degree is not None else get_max_degree(),
        )

    @contextmanager
    def timed(self, stage: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timing[stage] = self.timing.get(stage, 0.0) + time.perf_counter() - start

    def load(self, name: str) -> Fixture:
        with self.timed("parse"):
            return parse_fixture(resolve_fixture_path(name, self.fixtures_dir))

    def _report(self, command: str, fixture: Fixture, **flags: str) -> Report:
        return Report(
            command=command,
            fixture_name=fixture.name,
            fixture_hash=fixture.digest,
            max_degree=self.max_degree,
            flags={k: str(v) for k, v in sorted(flags.items())},
            validation=list(fixture.validation),
            timing=self.timing,
        )

    def resolution(self, fixture: Fixture, max_level: int) -> ResolutionCache:
        with self.timed("gate"):
            gate = finiteness_gate(fixture.track, max_level, self.max_generators)
        return ResolutionCache(
            fixture.track,
            max_level,
            self.max_generators,
            store=self.cache,
            key=fixture.track_key if self.cache else None,
            gate=gate,
        )

    def builder(self, fixture: Fixture, max_level: int) -> CochainBuilder:
        return CochainBuilder(self.resolution(fixture, max_level), fixture.module)

    # commands

    def validate(self, fixture: Fixture) -> Report:
        report = self._report("validate", fixture)
        report.passed = all(check.ok for check in report.validation)
        return report

    def gate(self, fixture: Fixture) -> Report:
        report = self._report("gate", fixture)
        with self.timed("gate"):
            report.gate = evaluate_gate(fixture.track, self.max_degree, self.max_generators)
        report.passed = report.gate.accepted
        return report

    def resolve(self, fixture: Fixture) -> Report:
        cache = self.resolution(fixture, self.max_degree)
        report = self._report("resolve", fixture)
        report.gate = cache.gate
        with self.timed("resolve"):
            report.resolution = resolution_report(cache, self.max_degree)
        report.passed = report.resolution.simplicial_identities_ok and all(level.matches for level in report.resolution.levels)
        return report

    def cohomology(self, fixture: Fixture, theory: str = ALL) -> Report:
        report = self._report("cohomology", fixture, theory=theory)
        n = self.max_degree
        if theory in (BW, ALL):
            with self.timed(BW):
                groups = bw_cohomology(fixture.track.one_cells, natural_system_from_module(fixture.module), n)
            report.cohomology.append(theory_table(BW, groups))
        if theory == BW:
            return report
        builder = self.builder(fixture, n)
        report.gate = builder.cache.gate
        results = {}
        for name in THEORIES if theory == ALL else (theory,):
            with self.timed(name):
                results[name] = compute_H(name, builder, n, check_normalized=True)
            report.cohomology.append(theory_table(name, results[name], normalized_agrees=True))
        if theory == ALL:
            with self.timed("comparisons"):
                shift = free_shift_comparison(builder, n)
                if shift is not None:
                    report.comparisons.append(shift)
                if n >= 1:
                    report.comparisons.append(bw_comparison(results[SO_BASE], fixture.module, n))
            report.passed = all(c.agrees for c in report.comparisons)
        return report

    def ses(self, fixture: Fixture) -> Report:
        builder = self.builder(fixture, self.max_degree)
        report = self._report("ses", fixture)
        report.gate = builder.cache.gate
        with self.timed("ses"):
            report.ses = [verify_ses_level(builder, level) for level in range(self.max_degree + 1)]
        report.passed = all(level.ok for level in report.ses)
        return report

    def les(self, fixture: Fixture, strict: bool = False) -> Report:
        builder = self.builder(fixture, self.max_degree)
        report = self._report("les", fixture, strict=strict)
        report.gate = builder.cache.gate
        with self.timed("ses"):
            report.ses = [verify_ses_level(builder, level) for level in range(self.max_degree + 1)]
        with self.timed("les"):
            report.les = les_verify(builder, self.max_degree, strict=strict)
        for name in (SO_TOTAL, SO_BASE, COMONAD):
            groups = [FinAbGroup(tuple(factors)) for factors in report.les.groups[name]]
            report.cohomology.append(theory_table(name, groups))
        report.passed = report.les.exact and all(level.ok for level in report.ses)
        return report

    def bw(self, fixture: Fixture) -> Report:
        report = self._report("bw", fixture)
        n = self.max_degree
        with self.timed(BW):
            groups = bw_cohomology(fixture.track.one_cells, natural_system_from_module(fixture.module), n + 1)
        report.cohomology.append(theory_table(BW, groups))
        if is_free(fixture.track.one_cells):
            report.comparisons.append(
                ComparisonReport(
                    name="BW vanishing on a free category",
                    degrees=list(range(2, n + 2)),
                    left=[list(groups[s].invariant_factors) for s in range(2, n + 2)],
                    right=[[] for _ in range(2, n + 2)],
                    agrees=all(groups[s].is_trivial() for s in range(2, n + 2)),
                )
            )
        report.gate = evaluate_gate(fixture.track, n, self.max_generators)
        if report.gate.accepted and n >= 1:
            builder = self.builder(fixture, n)
            with self.timed(SO_BASE):
                base = compute_H(SO_BASE, builder, n)
            report.cohomology.append(theory_table(SO_BASE, base))
            report.comparisons.append(bw_comparison(base, fixture.module, n))
        report.passed = all(c.agrees for c in report.comparisons)
        return report

    def nerve(self, fixture: Fixture, export: Optional[Path] = None) -> Report:
        report = self._report("nerve", fixture, export=export or "")
        n = self.max_degree
        group = nerve_group(fixture)
        with self.timed("nerve"):
            grid = double_nerve(fixture.track, n + 1)
            sset = diag(grid)
            violations = sset.identity_violations()
            groups = const_cohomology(sset, group, n)
        nerve = NerveReport(
            simplices=[len(level) for level in sset.simplices],
            nondegenerate=[len(sset.nondegenerate(k)) for k in range(sset.depth + 1)],
            identities_ok=not violations,
            cohomology=[list(g.invariant_factors) for g in groups],
            rendered=[f"H^{s}(BX; {group}) = {g}" for s, g in enumerate(groups)],
        )
        if export is not None:
            nerve.export_path = str(export_sset(sset, export))
        report.nerve = nerve
        track = fixture.track
        if len(track.two_cells.morphisms) == len(track.one_cells.morphisms):
            with self.timed("nerve"):
                flat = const_cohomology(category_nerve(track.one_cells, n + 1), group, n)
            report.comparisons.append(
                ComparisonReport(
                    name="classifying space vs categorical nerve",
                    degrees=list(range(n + 1)),
                    left=[list(g.invariant_factors) for g in groups],
                    right=[list(g.invariant_factors) for g in flat],
                    agrees=all(iso_check(a, b) for a, b in zip(groups, flat)),
                )
            )
        gate = evaluate_gate(track, n, self.max_generators)
        if gate.accepted and _is_groupoid(track.one_cells):
            builder = CochainBuilder(self.resolution(fixture, n), constant_module(track, group))
            total = compute_H(SO_TOTAL, builder, n)
            report.comparisons.append(nerve_comparison(groups, total))
        report.passed = nerve.identities_ok and all(c.agrees for c in report.comparisons)
        return report

    def run(self, command: str, name: str, theory: str = ALL, export: Optional[Path] = None, strict: bool = False) -> Report:
        fixture = self.load(name)
        logger.info("running %s on %s (max degree %d)", command, fixture.name, self.max_degree)
        if command == "validate":
            report = self.validate(fixture)
        elif command == "gate":
            report = self.gate(fixture)
        elif command == "resolve":
            report = self.resolve(fixture)
        elif command == "cohomology":
            report = self.cohomology(fixture, theory)
        elif command == "ses":
            report = self.ses(fixture)
        elif command == "les":
            report = self.les(fixture, strict=strict)
        elif command == "bw":
            report = self.bw(fixture)
        elif command == "nerve":
            report = self.nerve(fixture, export)
        else:
            raise ValueError(f"unknown command: {command}")
        logger.info("%s on %s finished: %s", command, fixture.name, "pass" if report.passed else "fail")
        return report


COMMANDS: List[str] = ["validate", "gate", "resolve", "cohomology", "ses", "les", "bw", "nerve"]

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Hashable, List, Tuple, Union

from trackhom.errors import InfiniteCategory
from trackhom.models.schemas import ComparisonReport
from trackhom.services.cat import FinCat, FreeCat
from trackhom.services.coeff import TrackModule
from trackhom.services.zmod import AbHom, CochainComplexZ, FinAbGroup, MatrixBuilder, cohomology_at, iso_check

logger = logging.getLogger(__name__)

Chain = Tuple[Hashable, ...]


@dataclass
class NaturalSystem:
    """An abelian group per morphism, with the actions of composition.

    ``left[(f, g)]`` carries D(f) to D(f;g) (post-composition with g), ``right[(f, g)]``
    carries D(g) to D(f;g) (pre-composition with f).
    """

    category: FinCat
    groups: Dict[Hashable, FinAbGroup]
    left: Dict[Tuple[Hashable, Hashable], AbHom]
    right: Dict[Tuple[Hashable, Hashable], AbHom]


def constant_system(category: FinCat, group: FinAbGroup) -> NaturalSystem:
    ident = AbHom.identity(group)
    pairs = list(category.composable_pairs())
    return NaturalSystem(
        category,
        {m: group for m in category.morphisms},
        {pair: ident for pair in pairs},
        {pair: ident for pair in pairs},
    )


def natural_system_from_module(module: TrackModule) -> NaturalSystem:
    """D(u) = loop fiber over u, acting by horizontal whiskering with unit 2-cells."""
    x = module.base
    category = x.one_cells
    left, right = {}, {}
    for f, g in category.composable_pairs():
        left[(f, g)] = module.hl(x.s0(f), x.s0(g))
        right[(f, g)] = module.hr(x.s0(f), x.s0(g))
    groups = {u: module.fiber(x.s0(u)) for u in category.morphisms}
    return NaturalSystem(category, groups, left, right)


def _chains(category: FinCat, length: int) -> List[Chain]:
    """Composable chains (v1, ..., vn), v1 applied first; length 0 gives one chain per object."""
    if length == 0:
        return [(x,) for x in category.objects]
    starting: Dict[Hashable, List[Hashable]] = {x: [] for x in category.objects}
    for m, (src, _) in category.morphisms.items():
        starting[src].append(m)
    chains: List[Chain] = [(m,) for m in category.morphisms]
    for _ in range(length - 1):
        chains = [chain + (m,) for chain in chains for m in starting[category.tgt(chain[-1])]]
    return chains


def _composite(category: FinCat, chain: Chain, length: int) -> Hashable:
    if length == 0:
        return category.identity(chain[0])
    return category.compose_all(chain, category.src(chain[0]))


def bw_complex(system: NaturalSystem, top: int) -> CochainComplexZ:
    category = system.category
    chains = [_chains(category, n) for n in range(top + 1)]
    offsets: List[Dict[Chain, int]] = []
    levels: List[FinAbGroup] = []
    for n, level_chains in enumerate(chains):
        position, table, groups = 0, {}, []
        for chain in level_chains:
            table[chain] = position
            group = system.groups[_composite(category, chain, n)]
            groups.append(group)
            position += group.size
        offsets.append(table)
        levels.append(FinAbGroup.direct_sum(groups))

    differentials = []
    for n in range(top):
        builder = MatrixBuilder(levels[n + 1].size, levels[n].size)
        for chain in chains[n + 1]:
            row = offsets[n + 1][chain]
            total = _composite(category, chain, n + 1)
            if n == 0:
                f = chain[0]
                src, tgt = category.src(f), category.tgt(f)
                # f acts on the identity at its source from the left, at its target from the right
                builder.add_block(row, offsets[0][(src,)], system.left[(category.identity(src), f)].matrix)
                builder.add_block(row, offsets[0][(tgt,)], system.right[(f, category.identity(tgt))].matrix, sign=-1)
                continue
            head = chain[:-1]
            builder.add_block(row, offsets[n][head], system.left[(_composite(category, head, n), chain[-1])].matrix)
            for i in range(1, n + 1):
                # merging applied morphisms i and i+1 is classical face n+1-i
                merged = chain[: i - 1] + (category.compose(chain[i - 1], chain[i]),) + chain[i + 1 :]
                block = offsets[n][merged]
                builder.add_block(row, block, _identity_matrix(system, total), sign=(-1) ** (n + 1 - i))
            tail = chain[1:]
            builder.add_block(
                row,
                offsets[n][tail],
                system.right[(chain[0], _composite(category, tail, n))].matrix,
                sign=(-1) ** (n + 1),
            )
        differentials.append(AbHom(levels[n], levels[n + 1], builder.build()))
    return CochainComplexZ(levels, differentials)


def _identity_matrix(system: NaturalSystem, morphism: Hashable):
    return AbHom.identity(system.groups[morphism]).matrix


def bw_cohomology(category: Union[FinCat, FreeCat], system: Union[NaturalSystem, FinAbGroup], max_degree: int) -> List[FinAbGroup]:
    """Baues-Wirsching cohomology H^0..H^max_degree."""
    if isinstance(category, FreeCat):
        if not category.acyclic:
            raise InfiniteCategory(f"free category on a cyclic quiver through {category.generators.find_cycle()}")
        category = category.materialize(name="free")
    if isinstance(system, FinAbGroup):
        system = constant_system(category, system)
    complex_ = bw_complex(system, max_degree + 1)
    groups = [cohomology_at(complex_, s) for s in range(max_degree + 1)]
    logger.info("BW cohomology of %s: %s", category.name or "category", [str(g) for g in groups])
    return groups


def bw_comparison(base_groups: List[FinAbGroup], module: TrackModule, max_degree: int) -> ComparisonReport:
    """so_base H^s against BW H^{s+1} of the 1-cell category, s = 1..max_degree."""
    bw = bw_cohomology(module.base.one_cells, natural_system_from_module(module), max_degree + 1)
    degrees = list(range(1, max_degree + 1))
    return ComparisonReport(
        name="so_base vs BW shifted",
        degrees=degrees,
        left=[list(base_groups[s].invariant_factors) for s in degrees],
        right=[list(bw[s + 1].invariant_factors) for s in degrees],
        agrees=all(iso_check(base_groups[s], bw[s + 1]) for s in degrees),
    )

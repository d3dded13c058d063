from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Hashable, List, Optional, Tuple

from pydantic import ValidationError as SchemaError

from trackhom.errors import IllDefinedComposite, ParseError, UnknownCell, UnknownMorphism, ValidationError
from trackhom.models.schemas import AUTO_VERTICAL, FixtureDoc, ModuleSpec, ValidationReport
from trackhom.services.cat import FinCat
from trackhom.services.coeff import TrackModule, constant_module, cyclic_module, explicit_module, validate_module
from trackhom.services.track import Cell, FinTrackCategory, validate_track
from trackhom.services.zmod import FinAbGroup, IntMatrix

logger = logging.getLogger(__name__)

TRACK_FIELDS = ("objects", "one_cells", "one_cell_composites", "two_cells", "two_cell_composites", "vertical")


def identity_name(obj: str) -> str:
    return f"id_{obj}"


def unit_name(one_cell: str) -> str:
    return f"1_{one_cell}"


@dataclass
class Fixture:
    doc: FixtureDoc
    track: FinTrackCategory
    module: TrackModule
    digest: str
    track_key: str
    path: Optional[Path] = None
    validation: List[ValidationReport] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.doc.name


def canonical_hash(payload: object) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def fixture_hash(doc: FixtureDoc) -> str:
    return canonical_hash(doc.model_dump(mode="json"))


def track_hash(doc: FixtureDoc) -> str:
    """Content key of the track-category part only; the module does not affect the resolution."""
    data = doc.model_dump(mode="json")
    return canonical_hash({key: data[key] for key in TRACK_FIELDS})


def load_fixture_doc(path: Path) -> FixtureDoc:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read fixture ({exc.strerror or exc})") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return FixtureDoc.model_validate(raw)
    except SchemaError as exc:
        problems = [f"{path}: {'/'.join(str(part) for part in err['loc'])}: {err['msg']}" for err in exc.errors()]
        raise ParseError("; ".join(problems)) from exc


def _one_cell_category(doc: FixtureDoc) -> FinCat:
    objects = tuple(doc.objects)
    known = set(objects)
    identities = {x: identity_name(x) for x in objects}
    morphisms: Dict[Hashable, Tuple[Hashable, Hashable]] = {identities[x]: (x, x) for x in objects}
    for spec in doc.one_cells:
        if spec.src not in known or spec.tgt not in known:
            raise UnknownMorphism(f"1-cell {spec.id!r} has an endpoint outside the object set", [f"one_cells/{spec.id}"])
        if spec.id in morphisms:
            raise ValidationError(f"1-cell {spec.id!r} is declared twice", [f"one_cells/{spec.id}"])
        morphisms[spec.id] = (spec.src, spec.tgt)
    table: Dict[Tuple[Hashable, Hashable], Hashable] = {}
    for m, (src, tgt) in morphisms.items():
        table[(identities[src], m)] = m
        table[(m, identities[tgt])] = m
    for spec in doc.one_cell_composites:
        for part in (spec.first, spec.then, spec.result):
            if part not in morphisms:
                raise UnknownMorphism(f"composite {spec.first} then {spec.then} names unknown 1-cell {part!r}")
        table[(spec.first, spec.then)] = spec.result
    return FinCat(objects, morphisms, identities, table, name=f"{doc.name} X0")


def _two_cell_category(doc: FixtureDoc, one: FinCat) -> Tuple[FinCat, Dict[Cell, Hashable], Dict[Cell, Hashable], Dict[Hashable, Cell]]:
    d0: Dict[Cell, Hashable] = {}
    d1: Dict[Cell, Hashable] = {}
    s0: Dict[Hashable, Cell] = {}
    for u in one.morphisms:
        cell = unit_name(u)
        s0[u] = cell
        d0[cell] = d1[cell] = u
    for spec in doc.two_cells:
        for end in (spec.src, spec.tgt):
            if end not in one.morphisms:
                raise UnknownCell(f"2-cell {spec.id!r} has unknown boundary 1-cell {end!r}", [f"two_cells/{spec.id}"])
        if one.morphisms[spec.src] != one.morphisms[spec.tgt]:
            raise UnknownCell(f"2-cell {spec.id!r} joins 1-cells that are not parallel", [f"two_cells/{spec.id}"])
        if spec.id in d0:
            raise ValidationError(f"2-cell {spec.id!r} is declared twice", [f"two_cells/{spec.id}"])
        d0[spec.id], d1[spec.id] = spec.src, spec.tgt
    morphisms = {c: one.morphisms[d0[c]] for c in d0}
    identities = {x: s0[one.identity(x)] for x in one.objects}
    units = set(s0.values())
    table: Dict[Tuple[Hashable, Hashable], Hashable] = {}
    by_source: Dict[Hashable, List[Cell]] = {}
    for c, (src, _) in morphisms.items():
        by_source.setdefault(src, []).append(c)
    for a, (_, mid) in morphisms.items():
        for b in by_source.get(mid, []):
            if a == identities[morphisms[a][0]]:
                table[(a, b)] = b
            elif b == identities[mid]:
                table[(a, b)] = a
            elif a in units and b in units and (d0[a], d0[b]) in one.table:
                table[(a, b)] = s0[one.table[(d0[a], d0[b])]]
    for spec in doc.two_cell_composites:
        for part in (spec.first, spec.then, spec.result):
            if part not in morphisms:
                raise UnknownCell(f"composite {spec.first} then {spec.then} names unknown 2-cell {part!r}")
        table[(spec.first, spec.then)] = spec.result
    return FinCat(one.objects, morphisms, identities, table, name=f"{doc.name} X1"), d0, d1, s0


def _parallel(d0: Dict[Cell, Hashable], d1: Dict[Cell, Hashable], src: Hashable, tgt: Hashable) -> List[Cell]:
    return [c for c in d0 if d0[c] == src and d1[c] == tgt]


def _inverses(doc: FixtureDoc, d0, d1, s0) -> Dict[Cell, Cell]:
    declared: Dict[Cell, Cell] = {}
    for spec in doc.two_cells:
        if spec.inverse:
            declared[spec.id] = spec.id if spec.inverse == "self" else spec.inverse
    if doc.vertical != AUTO_VERTICAL:
        declared.update(doc.vertical.inverses)
    for a, b in list(declared.items()):
        if b not in d0:
            raise UnknownCell(f"inverse of {a!r} names unknown 2-cell {b!r}")
        declared.setdefault(b, a)
    inverses: Dict[Cell, Cell] = {}
    for c in d0:
        if c in s0.values():
            inverses[c] = c
        elif c in declared:
            inverses[c] = declared[c]
        else:
            candidates = _parallel(d0, d1, d1[c], d0[c])
            if len(candidates) != 1:
                raise IllDefinedComposite(f"vertical inverse of {c!r} is not determined; declare it")
            inverses[c] = candidates[0]
    return inverses


def _vertical_composites(doc: FixtureDoc, d0, d1, s0, inverses: Dict[Cell, Cell]) -> Dict[Tuple[Cell, Cell], Cell]:
    units = set(s0.values())
    explicit: Dict[Tuple[Cell, Cell], Cell] = {}
    if doc.vertical != AUTO_VERTICAL:
        for spec in doc.vertical.compose:
            for part in (spec.first, spec.then, spec.result):
                if part not in d0:
                    raise UnknownCell(f"vertical composite {spec.first} then {spec.then} names unknown 2-cell {part!r}")
            explicit[(spec.first, spec.then)] = spec.result
    by_source: Dict[Hashable, List[Cell]] = {}
    for c in d0:
        by_source.setdefault(d0[c], []).append(c)
    vcomp: Dict[Tuple[Cell, Cell], Cell] = {}
    for a in d0:
        for b in by_source.get(d1[a], []):
            if a in units:
                vcomp[(a, b)] = b
            elif b in units:
                vcomp[(a, b)] = a
            elif (a, b) in explicit:
                vcomp[(a, b)] = explicit[(a, b)]
            elif inverses.get(a) == b:
                vcomp[(a, b)] = s0[d0[a]]
            elif doc.vertical == AUTO_VERTICAL:
                candidates = _parallel(d0, d1, d0[a], d1[b])
                if len(candidates) != 1:
                    raise IllDefinedComposite(
                        f"vertical composite of {a!r} and {b!r} is ambiguous; give a vertical table",
                        [f"vertical/{a}/{b}"],
                    )
                vcomp[(a, b)] = candidates[0]
    return vcomp


def build_track(doc: FixtureDoc) -> FinTrackCategory:
    one = _one_cell_category(doc)
    two, d0, d1, s0 = _two_cell_category(doc, one)
    inverses = _inverses(doc, d0, d1, s0)
    vcomp = _vertical_composites(doc, d0, d1, s0, inverses)
    return FinTrackCategory.from_tables(one, two, d0, d1, s0, vcomp, inverses, name=doc.name)


def _group(orders: List[int]) -> FinAbGroup:
    return FinAbGroup(tuple(orders))


def _matrix(rows: Optional[List[List[int]]], cols: int) -> Optional[IntMatrix]:
    if rows is None:
        return None
    return IntMatrix.from_rows(rows, cols)


def build_module(spec: ModuleSpec, track: FinTrackCategory) -> TrackModule:
    if spec.kind == "constant":
        return constant_module(track, _group(spec.group))
    if spec.kind == "cyclic":
        return cyclic_module(track, dict(spec.orders), default=spec.default)
    fibers = {}
    for cell, orders in spec.fibers.items():
        track.check_cell(cell)
        fibers[cell] = _group(orders)
    missing = [c for c in track.two_cells.morphisms if c not in fibers]
    if missing:
        raise UnknownCell(f"explicit module has no fiber over {missing[0]!r}", [f"module/fibers/{c}" for c in missing])
    hwhisker = {}
    for w in spec.hwhisker:
        hwhisker[(track.check_cell(w.first), track.check_cell(w.then))] = (
            _matrix(w.left, fibers[w.first].size),
            _matrix(w.right, fibers[w.then].size),
        )
    vwhisker = {}
    for w in spec.vwhisker:
        vwhisker[(track.check_cell(w.first), track.check_cell(w.then))] = (
            _matrix(w.left, fibers[w.first].size),
            _matrix(w.right, fibers[w.then].size),
        )
    vinverse = {track.check_cell(c): IntMatrix.from_rows(rows, fibers[c].size) for c, rows in spec.vinverse.items()}
    return explicit_module(track, fibers, hwhisker, vwhisker, vinverse)


def fixture_from_doc(doc: FixtureDoc, path: Optional[Path] = None) -> Fixture:
    track = build_track(doc)
    track_report = validate_track(track)
    if not track_report.ok:
        raise ValidationError(f"{doc.name}: track category fails {len(track_report.violations)} axiom checks", track_report.violations)
    module = build_module(doc.module, track)
    module_report = validate_module(module)
    if not module_report.ok:
        raise ValidationError(f"{doc.name}: module fails {len(module_report.violations)} axiom checks", module_report.violations)
    fixture = Fixture(
        doc=doc,
        track=track,
        module=module,
        digest=fixture_hash(doc),
        track_key=track_hash(doc),
        path=path,
        validation=[track_report, module_report],
    )
    logger.info(
        "fixture %s: %d objects, %d 1-cells, %d 2-cells, hash %s",
        doc.name,
        len(track.objects),
        len(track.one_cells.morphisms),
        len(track.two_cells.morphisms),
        fixture.digest[:12],
    )
    return fixture


def parse_fixture(path: Path) -> Fixture:
    path = Path(path)
    return fixture_from_doc(load_fixture_doc(path), path)


def resolve_fixture_path(name: str, fixtures_dir: Path) -> Path:
    """Accept a path, or the bare name of a shipped fixture."""
    candidate = Path(name)
    if candidate.exists():
        return candidate
    shipped = Path(fixtures_dir) / f"{name}.json"
    if shipped.exists():
        return shipped
    return candidate

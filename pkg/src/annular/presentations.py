"""Words over diagram generators and machine checks of relation lists.

Relations are stored as concrete instances (indices already substituted).
Each instance carries a status:

``stated``     the relation as printed, expected to hold;
``typo``       the relation as printed, expected to fail (a witness is kept);
``corrected``  our repaired version of a ``typo`` relation, expected to hold.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .diagram import (
    BOTTOM, TOP, AffineDiagram, DiagramError, FamilyId, ScaledElement, canonicalize, compose,
    identity, juxtapose, make_generator,
)
from .exactmath import Fp, MultiLaurent


# --- words ---------------------------------------------------------------------

_TOKEN = re.compile(r"^(tauinv|tau-|tau|id|e|s|p|l|r|t)(\d+)?(\.5)?(\^-?\d+)?$")


@dataclass(frozen=True)
class Letter:
    kind: str        # e, s, p, phalf, l, r, t, tau, tauinv, id, rook_e
    index: int | None
    power: int = 1

    def __str__(self):
        name = {"phalf": "p", "tauinv": "tau-", "rook_e": "e"}.get(self.kind, self.kind)
        if self.index is not None:
            name += str(self.index) + (".5" if self.kind == "phalf" else "")
        if self.power != 1:
            name += f"^{self.power}"
        return name


def parse_token(tok: str) -> Letter:
    mt = _TOKEN.match(tok)
    if not mt:
        raise ValueError(f"bad generator token {tok!r}")
    name, idx, half, pw = mt.groups()
    power = int(pw[1:]) if pw else 1
    if name in ("tau-", "tauinv"):
        return Letter("tauinv", None, power)
    if name in ("tau", "id"):
        if idx is not None:
            raise ValueError(f"{name} takes no index")
        return Letter(name, None, power)
    if idx is None:
        if name == "e":
            return Letter("rook_e", None, power)
        raise ValueError(f"{name} needs an index")
    if half:
        if name != "p":
            raise ValueError("only p takes half-integer indices")
        return Letter("phalf", int(idx), power)
    return Letter(name, int(idx), power)


def parse_word(text: str):
    text = text.strip()
    if text in ("", "1"):
        return ()
    return tuple(parse_token(tok) for tok in text.split())


def word_str(word) -> str:
    return " ".join(str(x) for x in word) if word else "1"


# --- presentations ---------------------------------------------------------------

@dataclass(frozen=True)
class Relator:
    lhs: tuple
    rhs: tuple
    beta: int = 0
    alpha: int = 0
    label: str = ""
    status: str = "stated"

    def __str__(self):
        scal = ""
        if self.beta:
            scal += "beta" + (f"^{self.beta}" if self.beta != 1 else "") + " "
        if self.alpha:
            scal += "alpha" + (f"^{self.alpha}" if self.alpha != 1 else "") + " "
        return f"{word_str(self.lhs)} = {scal}{word_str(self.rhs)}"


@dataclass
class Presentation:
    family: FamilyId
    m: int
    generators: tuple           # allowed letter kinds
    relators: list = field(default_factory=list)
    mode: str = "plain"         # or "mod"
    merge_alpha: bool = False   # compare in the alpha = beta specialisation

    def add(self, lhs, rhs, beta=0, alpha=0, label="", status="stated"):
        self.relators.append(Relator(parse_word(lhs), parse_word(rhs), beta, alpha, label, status))


def letter_diagram(letter: Letter, m: int) -> AffineDiagram:
    if letter.kind == "id":
        return identity(m)
    if letter.kind in ("tau", "tauinv"):
        return make_generator(letter.kind, m, power=letter.power)
    if letter.kind == "t":
        return make_generator("t", m, letter.index, power=letter.power)
    d = make_generator(letter.kind, m, letter.index)
    if letter.power == 1:
        return d
    if letter.power < 1:
        raise DiagramError(f"{letter} is not invertible")
    acc = ScaledElement(d)
    for _ in range(letter.power - 1):
        acc = acc * ScaledElement(d)
    if acc.beta:
        raise DiagramError("use explicit products for powers that create closed components")
    return acc.diagram


def _power_element(letter: Letter, m: int) -> ScaledElement:
    if letter.kind in ("tau", "tauinv", "t") or letter.power == 1:
        return ScaledElement(letter_diagram(letter, m))
    base = ScaledElement(make_generator(letter.kind, m, letter.index))
    acc = base
    for _ in range(letter.power - 1):
        acc = acc * base
    return acc


def check_letter(pres: Presentation, letter: Letter):
    if letter.kind == "id":
        return
    if letter.kind not in pres.generators:
        raise ValueError(f"generator {letter} not declared for {pres.family}")
    if pres.mode == "plain" and letter.index is not None:
        top = pres.m if letter.kind in ("p", "t") else pres.m - 1
        if not 1 <= letter.index <= top:
            raise ValueError(f"index of {letter} out of range for m={pres.m}")


def eval_word(pres: Presentation, word) -> ScaledElement:
    """Left-to-right product of the letters (leftmost factor on top)."""
    if isinstance(word, str):
        word = parse_word(word)
    acc = ScaledElement(identity(pres.m))
    for letter in word:
        check_letter(pres, letter)
        acc = acc * _power_element(letter, pres.m)
    if pres.family.reduced:
        acc = acc.reduced()
    if pres.merge_alpha:
        acc = acc.merged()
    return acc


@dataclass
class RelationRecord:
    suite: str
    label: str
    relation: str
    status: str
    passed: bool
    lhs: str = ""
    rhs: str = ""


def _scaled_key(x: ScaledElement):
    return (x.diagram, x.beta, x.alpha)


def check_relations(pres: Presentation, suite: str = "") -> list:
    out = []
    for rel in pres.relators:
        try:
            lhs = eval_word(pres, rel.lhs)
            rhs = eval_word(pres, rel.rhs)
        except (ValueError, DiagramError) as exc:
            out.append(RelationRecord(suite, rel.label, str(rel), rel.status, False, str(exc), ""))
            continue
        rhs = ScaledElement(rhs.diagram, rhs.beta + rel.beta, rhs.alpha + rel.alpha)
        if pres.merge_alpha:
            rhs = rhs.merged()
        ok = _scaled_key(lhs) == _scaled_key(rhs)
        out.append(RelationRecord(suite, rel.label, str(rel), rel.status, ok,
                                  f"beta^{lhs.beta} alpha^{lhs.alpha} loops={lhs.diagram.loops}",
                                  f"beta^{rhs.beta} alpha^{rhs.alpha} loops={rhs.diagram.loops}"))
    return out


def summarize(records) -> dict:
    """Verdict for a report: every stated/corrected instance passes and every
    printed typo relation is refuted by at least one instance."""
    bad = [r for r in records if r.status in ("stated", "corrected") and not r.passed]
    typo_labels = {r.label for r in records if r.status == "typo"}
    refuted = {r.label for r in records if r.status == "typo" and not r.passed}
    unrefuted = sorted(typo_labels - refuted)
    return {
        "instances": len(records),
        "failures": bad,
        "typos_refuted": sorted(refuted),
        "typos_unrefuted": unrefuted,
        "ok": not bad and not unrefuted,
    }


# --- presentation files -----------------------------------------------------------

def parse_presentation(text: str) -> Presentation:
    pres = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("presentation"):
            toks = line.split()
            if len(toks) < 3:
                raise ValueError(f"line {lineno}: presentation <family> m=<int> [r=<int>]")
            kv = dict(tok.split("=", 1) for tok in toks[2:])
            r = int(kv["r"]) if "r" in kv else None
            fam = FamilyId.parse(toks[1], r=r)
            m = int(kv["m"])
            pres = Presentation(fam, m, _declared(fam), mode="plain" if fam.flavor == "ordinary" else "mod",
                                merge_alpha=(fam.flavor in ("affineReduced", "periodicReduced", "rReduced")
                                             and fam.base in ("Pa", "Br", "RoBr", "Ro")))
            continue
        if pres is None:
            raise ValueError(f"line {lineno}: relation before presentation header")
        if not line.startswith("rel "):
            raise ValueError(f"line {lineno}: expected 'rel'")
        body = line[4:]
        if "=" not in body:
            raise ValueError(f"line {lineno}: relation needs '='")
        lhs, rhs = body.split("=", 1)
        beta = alpha = 0
        toks = rhs.split()
        while toks and (toks[0].startswith("beta") or toks[0].startswith("alpha")):
            name, _, ex = toks.pop(0).partition("^")
            if name == "beta":
                beta += int(ex or 1)
            else:
                alpha += int(ex or 1)
        try:
            pres.add(lhs, " ".join(toks), beta, alpha, label=f"line{lineno}")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}")
    if pres is None:
        raise ValueError("no presentation header")
    return pres


def format_presentation(pres: Presentation) -> str:
    r = f" r={pres.family.r}" if pres.family.r else ""
    lines = [f"presentation {pres.family} m={pres.m}{r}"]
    for rel in pres.relators:
        lines.append(f"rel {rel}")
    return "\n".join(lines) + "\n"


# --- built-in suites ----------------------------------------------------------------

def _declared(fam: FamilyId):
    base = {
        "TL": ("e",), "PRo": ("l", "r"), "Mo": ("e", "l", "r"), "Br": ("s", "e"),
        "Ro": ("rook_e", "s", "p"), "RoBr": ("s", "e", "p"), "Pa": ("s", "p", "phalf"),
    }[fam.base]
    if fam.flavor in ("affineBar", "affineReduced", "rReduced"):
        base = base + ("tau", "tauinv")
        if fam.base in ("Pa", "Br", "RoBr", "Ro"):
            base = base + ("t",)
    return base


class _Idx:
    """Index helper: ordinary families use 1..m-1, periodic ones Z/m."""

    def __init__(self, m, periodic):
        self.m = m
        self.periodic = periodic

    def __call__(self, k):
        return k % self.m if self.periodic else k

    def strands(self):
        return range(self.m) if self.periodic else range(1, self.m)

    def valid(self, *ks):
        if self.periodic:
            return True
        return all(1 <= k <= self.m - 1 for k in ks)

    def far(self, i, j):
        """|i - j| > 1, cyclically when periodic."""
        if self.periodic:
            d = (i - j) % self.m
            return d not in (0, 1, self.m - 1)
        return abs(i - j) > 1


def _tl_core(P, ix, rel_prefix="TL"):
    for i in ix.strands():
        P.add(f"e{ix(i)} e{ix(i)}", f"e{ix(i)}", beta=1, label=f"{rel_prefix}1")
        for d in (1, -1):
            if ix.valid(i + d):
                P.add(f"e{ix(i)} e{ix(i+d)} e{ix(i)}", f"e{ix(i)}", label=f"{rel_prefix}2")
        for j in ix.strands():
            if ix.far(i, j):
                P.add(f"e{ix(i)} e{ix(j)}", f"e{ix(j)} e{ix(i)}", label=f"{rel_prefix}3")


def _tau_rels(P, m, kinds, label):
    P.add("tau tau-", "1", label=f"{label}-inv")
    P.add("tau- tau", "1", label=f"{label}-inv")
    for k in kinds:
        for i in range(m):
            P.add(f"tau {k}{i} tau-", f"{k}{(i + 1) % m}", label=f"{label}-conj-{k}")


def _pair(P, lhs, printed_rhs, corrected_rhs, label, printed_beta=0, corrected_beta=0):
    """Record a printed relation (expected to fail) next to its repair."""
    P.add(lhs, printed_rhs, beta=printed_beta, label=f"{label}-printed", status="typo")
    P.add(lhs, corrected_rhs, beta=corrected_beta, label=f"{label}-corrected", status="corrected")


def _pro_core(P, ix):
    # The printed list is the monoid presentation; with every closed
    # component (isolated dot pairs included) weighted by beta, the
    # relations pick up the powers recorded in the corrected versions.
    for i in ix.strands():
        a = ix(i)
        _pair(P, f"l{a} l{a} l{a}", f"l{a} l{a}", f"l{a} l{a}", "PRo1", 2, 1)
        P.add(f"r{a} r{a} r{a}", f"r{a} r{a}", beta=1, label="PRo1-corrected", status="corrected")
        P.add(f"l{a} l{a}", f"r{a} r{a}", label="PRo1")
        if ix.valid(i + 1):
            b = ix(i + 1)
            _pair(P, f"r{a} r{b} r{a}", f"r{a} r{b}", f"r{a} r{b}", "PRo2", 0, 1)
            _pair(P, f"r{b} r{a} r{b}", f"r{a} r{b}", f"r{a} r{b}", "PRo2", 0, 1)
            _pair(P, f"l{a} l{b} l{a}", f"l{b} l{a}", f"l{b} l{a}", "PRo2", 0, 1)
            _pair(P, f"l{b} l{a} l{b}", f"l{b} l{a}", f"l{b} l{a}", "PRo2", 0, 1)
            _pair(P, f"r{b} l{a} r{a}", f"r{b} l{a}", f"r{b} l{a}", "PRo4", 0, 1)
            _pair(P, f"l{a} r{a} l{b}", f"r{a} l{b}", f"r{a} l{b}", "PRo5", 0, 1)
            P.add(f"r{a} l{a}", f"l{b} r{b}", label="PRo6")
        _pair(P, f"r{a} l{a} r{a}", f"r{a}", f"r{a}", "PRo3", 0, 2)
        _pair(P, f"l{a} r{a} l{a}", f"l{a}", f"l{a}", "PRo3", 0, 2)
        if ix.valid(i - 1):
            c = ix(i - 1)
            _pair(P, f"l{c} r{a} l{a}", f"l{c} r{a}", f"l{c} r{a}", "PRo4", 0, 1)
            _pair(P, f"r{a} l{a} r{c}", f"l{a} r{c}", f"l{a} r{c}", "PRo5", 0, 1)
        for j in ix.strands():
            if ix.far(i, j):
                b = ix(j)
                P.add(f"r{a} l{b}", f"l{b} r{a}", label="PRo7")
                P.add(f"r{a} r{b}", f"r{b} r{a}", label="PRo7")
                P.add(f"l{a} l{b}", f"l{b} l{a}", label="PRo7")


def _mo_core(P, ix):
    _pro_core(P, ix)
    for i in ix.strands():
        a = ix(i)
        for j in ix.strands():
            if ix.far(i, j):
                b = ix(j)
                if i != j:
                    P.add(f"r{a} l{b}", f"r{b} l{a}", label="Mo1-printed", status="typo")
                P.add(f"r{a} l{b}", f"l{b} r{a}", label="Mo1-corrected", status="corrected")
                P.add(f"e{a} r{b}", f"r{b} e{a}", label="Mo1")
                P.add(f"e{a} l{b}", f"l{b} e{a}", label="Mo1")
                P.add(f"e{a} e{b}", f"e{b} e{a}", label="Mo1")
        P.add(f"e{a} e{a}", f"e{a}", beta=1, label="Mo2")
        for d in (1, -1):
            if ix.valid(i + d):
                P.add(f"e{a} e{ix(i+d)} e{a}", f"e{a}", label="Mo2")
        _pair(P, f"e{a} l{a}", f"r{a} e{a}", f"e{a} r{a}", "Mo3a")
        _pair(P, f"l{a} e{a}", f"e{a} r{a}", f"r{a} e{a}", "Mo3b")
        if ix.valid(i + 1):
            b = ix(i + 1)
            _pair(P, f"e{a} r{b}", f"r{b} e{a} l{a}", f"e{a} e{b} l{a}", "Mo4a")
            _pair(P, f"l{b} e{a}", f"r{a} e{a} l{b}", f"r{a} e{b} e{a}", "Mo4b")
            P.add(f"r{a} r{b} e{a}", f"e{b} r{a} r{b}", label="Mo5-printed", status="typo")
            P.add(f"e{a} r{b} r{a}", f"r{b} r{a} e{b}", label="Mo5-corrected", status="corrected")
            P.add(f"l{a} l{b} e{a}", f"e{b} l{a} l{b}", label="Mo5")
        P.add(f"e{a} l{a} e{a}", f"e{a}", beta=1, label="Mo6")


def _sym_s(P, ix):
    for i in ix.strands():
        a = ix(i)
        P.add(f"s{a} s{a}", "1", label="S1")
        if ix.valid(i + 1):
            b = ix(i + 1)
            P.add(f"s{a} s{b} s{a}", f"s{b} s{a} s{b}", label="S1")
        for j in ix.strands():
            if ix.far(i, j):
                P.add(f"s{a} s{ix(j)}", f"s{ix(j)} s{a}", label="S1")


def _br_core(P, ix):
    _sym_s(P, ix)
    for i in ix.strands():
        a = ix(i)
        P.add(f"e{a} e{a}", f"e{a}", beta=1, label="Br2")
        for d in (1, -1):
            if ix.valid(i + d):
                b = ix(i + d)
                P.add(f"e{a} e{b} e{a}", f"e{a}", label="Br2")
                P.add(f"s{a} s{b} e{a}", f"e{b} e{a}", label="Br4")
                P.add(f"e{a} s{b} s{a}", f"e{a} e{b}", label="Br4")
        for j in ix.strands():
            if ix.far(i, j):
                b = ix(j)
                P.add(f"e{a} e{b}", f"e{b} e{a}", label="Br3")
                P.add(f"s{a} e{b}", f"e{b} s{a}", label="Br3")
        P.add(f"s{a} e{a}", f"e{a}", label="Br4")
        P.add(f"e{a} s{a}", f"e{a}", label="Br4")


def _affine_twists(P, m, A, with_e=True, with_s=True):
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            P.add(f"t{i} t{j}", f"t{j} t{i}", label="aff-tt")
            P.add(f"t{i} t{i}^-1", "1", label="aff-tinv")
    for i in range(1, m):
        for j in range(1, m + 1):
            if abs(i - j) > 1:
                if with_s:
                    P.add(f"s{i} t{j}", f"t{j} s{i}", label="aff-st")
                if with_e:
                    P.add(f"e{i} t{j}", f"t{j} e{i}", label="aff-et")
        if with_s:
            P.add(f"s{i} t{i}", f"t{i+1} s{i}", label="aff-st")
        if with_e:
            P.add(f"e{i} t{i} t{i+1}", f"e{i}", label="aff-ett")
            P.add(f"t{i} t{i+1} e{i}", f"e{i}", label="aff-ett")
            for a in range(-A, A + 1):
                P.add(f"e{i} t{i}^{a} e{i}", f"e{i}", beta=1, label="aff-ete")


def _tau_power_pairs(P, m, label_l, label_r):
    # (tau l_1)^m matches tau^m (tau l_1) up to m-1 isolated dot pairs;
    # (tau r_1)^k is already stable from k = m-1 on
    _pair(P, " ".join(["tau l1"] * m), "tau^%d tau l1" % m, "tau^%d tau l1" % m, label_l, 0, m - 1)
    if label_r:
        _pair(P, " ".join(["tau r1"] * m), "tau^%d tau r1" % m, " ".join(["tau r1"] * (m - 1)),
              label_r, 0, 1)


def builtin_presentation(name: str, m: int, A: int = 2) -> Presentation:
    """Relation suites: TL, pTLbar, aTLbar, PRo, pPRo, aPRo, Mo, pMobar,
    aMobar, Br, pBrbar, aBr, Ro, pRo, aRo, RoBr, pRoBrbar, aRoBr, Pa,
    pPabar, aPa."""
    fam = FamilyId.parse(name)
    periodic = fam.flavor != "ordinary"
    ix = _Idx(m, periodic)
    P = Presentation(fam, m, _declared(fam), mode="mod" if periodic else "plain",
                     merge_alpha=(fam.base in ("Pa", "Br", "RoBr", "Ro") and fam.reduced
                                  and fam.flavor != "ordinary"))
    affine = fam.flavor in ("affineBar", "affineReduced")
    base = fam.base
    if base == "TL":
        _tl_core(P, ix)
        if affine:
            _tau_rels(P, m, ["e"], "aTL")
            # printed with a stray letter n; read as m
            P.add(" ".join(["tau e1"] * (m - 1)), "tau^%d tau e1" % m, label="aTL5")
            for i in range(m):
                word = " ".join(f"e{(i + 2 + k) % m}" for k in range(m - 1))
                P.add(word, f"tau^2 e{i}", label="aTL5b")
    elif base == "PRo":
        _pro_core(P, ix)
        if affine:
            _tau_rels(P, m, ["l", "r"], "aPRo")
            _tau_power_pairs(P, m, "aPRo8", "aPRo9")
    elif base == "Mo":
        _mo_core(P, ix)
        if affine:
            _tau_rels(P, m, ["l", "r", "e"], "aMo")
            _tau_power_pairs(P, m, "aMo7", None)
            # printed with l on the left but labelled for r
            P.add(" ".join(["tau l1"] * m), "tau^%d tau r1" % m, label="aMo8-printed", status="typo")
            P.add(" ".join(["tau r1"] * m), " ".join(["tau r1"] * (m - 1)), beta=1,
                  label="aMo8-corrected", status="corrected")
            P.add(" ".join(["tau e1"] * (m - 1)), "tau^%d tau e1" % m, label="aMo9")
    elif base == "Br":
        _br_core(P, ix)
        if affine:
            _affine_twists(P, m, A)
    elif base == "Ro":
        _sym_s(P, ix)
        P.add("e e", "e", beta=1, label="Ro2")
        P.add("e s1 e s1", "e s1 e s1 e s1", beta=2, label="Ro2-printed", status="typo")
        P.add("e s1 e s1 e s1", "e s1 e s1", beta=1, label="Ro2-corrected", status="corrected")
        for i in ix.strands():
            if i > 1:
                P.add(f"e s{ix(i)}", f"s{ix(i)} e", label="Ro3")
        if affine:
            _affine_twists(P, m, A, with_e=False)
            P.add("t1 e", "e", label="aRo-te")
            P.add("e t1", "e", label="aRo-te")
            for i in range(2, m + 1):
                P.add(f"t{i} e", f"e t{i}", label="aRo-te")
    elif base == "RoBr":
        _br_core(P, ix)
        _robr_core(P, ix)
        if affine:
            _affine_twists(P, m, A)
            for i in range(1, m + 1):
                P.add(f"t{i} p{i}", f"p{i}", label="aRoBr-tp")
                P.add(f"p{i} t{i}", f"p{i}", label="aRoBr-tp")
    elif base == "Pa":
        _pa_core(P, ix)
        if affine:
            _pa_affine(P, m, A)
    else:
        raise ValueError(f"no built-in suite for {name}")
    return P


def _robr_core(P, ix):
    for i in ix.strands():
        a = ix(i)
        b = ix(i + 1) if ix.periodic else i + 1
        for j in ix.strands():
            if ix.far(i, j):
                P.add(f"e{a} p{ix(j)}", f"e{ix(j)} p{a}", label="RoBr1-printed", status="typo")
                P.add(f"e{a} p{ix(j)}", f"p{ix(j)} e{a}", label="RoBr1-corrected", status="corrected")
        P.add(f"e{a} p{_p(ix, i)}", f"e{a} p{_p(ix, i + 1)}", label="RoBr2")
        _pair(P, f"e{a} p{_p(ix, i)} p{_p(ix, i + 1)}", f"e{a} p{_p(ix, i)}", f"e{a} p{_p(ix, i)}",
              "RoBr2a", 0, 1)
        P.add(f"p{_p(ix, i)} e{a}", f"p{_p(ix, i + 1)} e{a}", label="RoBr2")
        _pair(P, f"p{_p(ix, i)} p{_p(ix, i + 1)} e{a}", f"p{_p(ix, i)} e{a}", f"p{_p(ix, i)} e{a}",
              "RoBr2b", 0, 1)
        P.add(f"e{a} p{_p(ix, i)} e{a}", f"e{a}", beta=2, label="RoBr3-printed", status="typo")
        P.add(f"e{a} p{_p(ix, i)} e{a}", f"e{a}", beta=1, label="RoBr3-corrected", status="corrected")
        P.add(f"p{_p(ix, i)} e{a} p{_p(ix, i)}", f"p{_p(ix, i)} p{_p(ix, i + 1)}", label="RoBr3")


def _p(ix, k):
    """Index of p_k: 1..m in the ordinary case, mod m when periodic."""
    return k % ix.m if ix.periodic else k


def _pa_core(P, ix):
    _sym_s(P, ix)
    m = ix.m
    ints = list(range(m)) if ix.periodic else list(range(1, m + 1))
    halves = list(ix.strands())  # p_{i+1/2}

    def pi(k):
        return f"p{_p(ix, k)}"

    def ph(k):
        return f"p{ix(k)}.5"

    for i in ints:
        P.add(f"{pi(i)} {pi(i)}", pi(i), beta=1, label="Pa1")
        for h in (i - 1, i):
            if (ix.periodic or 1 <= h <= m - 1):
                P.add(f"{pi(i)} {ph(h)} {pi(i)}", pi(i), label="Pa1")
        for j in ints:
            P.add(f"{pi(i)} {pi(j)}", f"{pi(j)} {pi(i)}", label="Pa1")
    for h in halves:
        P.add(f"{ph(h)} {ph(h)}", ph(h), label="Pa1-half")
        for i in (h, h + 1):
            P.add(f"{ph(h)} {pi(i)} {ph(h)}", ph(h), label="Pa1")
        for h2 in halves:
            if ix.far(h, h2) or h == h2:
                P.add(f"{ph(h)} {ph(h2)}", f"{ph(h2)} {ph(h)}", label="Pa1")
        for i in ints:
            near = {h % m, (h + 1) % m} if ix.periodic else {h, h + 1}
            if (i % m if ix.periodic else i) not in near:
                P.add(f"{ph(h)} {pi(i)}", f"{pi(i)} {ph(h)}", label="Pa1")
    for i in ix.strands():
        a = ix(i)
        P.add(f"s{a} {pi(i)} {pi(i + 1)}", f"{pi(i)} {pi(i + 1)}", label="Pa3")
        P.add(f"{pi(i)} {pi(i + 1)} s{a}", f"{pi(i)} {pi(i + 1)}", label="Pa3")
        P.add(f"s{a} {pi(i)} s{a}", pi(i + 1), label="Pa3")
        P.add(f"s{a} {ph(i)}", ph(i), label="Pa4")
        P.add(f"{ph(i)} s{a}", ph(i), label="Pa4")
        if ix.valid(i + 1):
            b = ix(i + 1)
            P.add(f"s{a} s{b} {ph(i)} s{b} s{a}", ph(i + 1), label="Pa4")
        # s_i commutes with p_j away from strands i, i+1 and with distant squares
        for j in ints:
            jj = j % m if ix.periodic else j
            if jj not in ({i % m, (i + 1) % m} if ix.periodic else {i, i + 1}):
                P.add(f"s{a} {pi(j)}", f"{pi(j)} s{a}", label="Pa5")
        for h in halves:
            if ix.far(i, h):
                P.add(f"s{a} {ph(h)}", f"{ph(h)} s{a}", label="Pa5")


def _pa_affine(P, m, A):
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            P.add(f"t{i} t{j}", f"t{j} t{i}", label="aff-tt")
        P.add(f"t{i} t{i}^-1", "1", label="aff-tinv")
    for i in range(1, m):
        P.add(f"s{i} t{i}", f"t{i+1} s{i}", label="aff-st")
        for j in range(1, m + 1):
            if abs(i - j) > 1:
                P.add(f"s{i} t{j}", f"t{j} s{i}", label="aff-st")
                P.add(f"p{i}.5 t{j}", f"t{j} p{i}.5", label="aPa6")
        P.add(f"p{i}.5 t{i} t{i+1}", f"t{i} t{i+1} p{i}.5", label="aPa7")
        for a in range(-A, A + 1):
            P.add(f"p{i}.5 t{i}^{a} p{i}.5", f"p{i}.5", beta=1, label="aPa8-printed", status="typo")
    for i in range(1, m + 1):
        for a in range(-A, A + 1):
            P.add(f"p{i} t{i}^{a} p{i}", f"p{i}", beta=1, label="aPa8-corrected", status="corrected")
        P.add(f"t{i} p{i}", f"p{i}", label="aPa-tp")


BUILTIN_SUITES = ("TL", "pTLbar", "aTLbar", "PRo", "pPRo", "aPRo", "Mo", "pMobar", "aMobar",
                  "Br", "pBrbar", "aBr", "Ro", "pRo", "aRo", "RoBr", "pRoBrbar", "aRoBr",
                  "Pa", "pPabar", "aPa")


def run_builtin(name: str, m: int, A: int = 2) -> list:
    return check_relations(builtin_presentation(name, m, A), suite=f"{name} m={m}")


# --- generator sets and closure ------------------------------------------------------

def periodic_generators(base: str, m: int):
    kinds = {
        "TL": ["e"], "PRo": ["l", "r"], "Mo": ["e", "l", "r"], "Br": ["s", "e"],
        "Ro": ["s"], "RoBr": ["s", "e", "p"], "Pa": ["s", "p", "phalf"],
    }[base]
    gens = [make_generator(k, m, i) for k in kinds for i in range(m)]
    if base == "Ro":
        gens.append(make_generator("p", m, 1))
    return gens


def affine_generators(base: str, m: int):
    gens = periodic_generators(base, m)
    gens += [make_generator("tau", m), make_generator("tauinv", m)]
    if base in ("Pa", "Br", "RoBr", "Ro"):
        for i in range(1, m + 1):
            gens += [make_generator("t", m, i, 1), make_generator("t", m, i, -1)]
    return gens


@dataclass
class ClosureResult:
    elements: set
    hit_cap: bool


def generated_closure(generators, size_cap: int = 10000, reduce_loops: bool = False,
                      target=None) -> ClosureResult:
    """Monoid generated by the given diagrams (identity included), by BFS."""
    gens = list(generators)
    if not gens:
        return ClosureResult(set(), False)
    m = gens[0].s

    def norm(d):
        if reduce_loops and d.loops:
            return AffineDiagram(d.s, d.t, 0, d.blocks)
        return d

    start = identity(m)
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = norm(compose(x, g).diagram)
            if y not in seen:
                seen.add(y)
                if target is not None and y == target:
                    return ClosureResult(seen, False)
                if len(seen) >= size_cap:
                    return ClosureResult(seen, True)
                queue.append(y)
    return ClosureResult(seen, False)


# --- category relations -----------------------------------------------------------

def _cat_gens():
    X = canonicalize(2, 2, blocks=[[("b", 0), ("t", 1)], [("b", 1), ("t", 0)]])
    D = canonicalize(2, 2, blocks=[[("b", 0), ("b", 1), ("t", 0), ("t", 1)]])
    etop = canonicalize(0, 1, blocks=[[("t", 0)]])
    ebot = canonicalize(1, 0, blocks=[[("b", 0)]])
    phip = canonicalize(1, 1, blocks=[[("b", 0), ("t", 1)]])
    phim = canonicalize(1, 1, blocks=[[("b", 0), ("t", -1)]])
    cup = canonicalize(0, 2, blocks=[[("t", 0), ("t", 1)]])
    cap = canonicalize(2, 0, blocks=[[("b", 0), ("b", 1)]])
    return dict(X=X, D=D, etop=etop, ebot=ebot, phip=phip, phim=phim, cup=cup, cap=cap)


def _el(d):
    return ScaledElement(d)


def _c(*xs):
    """Composition a o b o ..., i.e. the rightmost factor acts first."""
    acc = xs[0]
    for x in xs[1:]:
        acc = acc * x
    return acc


def _t(*xs):
    acc = xs[0]
    for x in xs[1:]:
        acc = ScaledElement(juxtapose(acc.diagram, x.diagram), acc.beta + x.beta,
                            acc.alpha + x.alpha)
    return acc


def _cat_relations():
    g = {k: _el(v) for k, v in _cat_gens().items()}
    X, D, et, eb = g["X"], g["D"], g["etop"], g["ebot"]
    pp, pm, cup, cap = g["phip"], g["phim"], g["cup"], g["cap"]
    I = _el(identity(1))
    i0 = _el(AffineDiagram(0, 0, 0, ()))
    i2 = _el(identity(2))
    beta = lambda x, k=1: ScaledElement(x.diagram, x.beta + k, x.alpha)
    rels = []

    def R(label, gens, lhs, rhs, status="stated"):
        rels.append((label, frozenset(gens), lhs, rhs, status))

    # partition category
    R("Pa-a", "X", _c(X, X), i2)
    R("Pa-a", "E", _c(eb, et), beta(i0))
    R("Pa-b-printed", "D", _c(D, D), beta(D), "typo")
    R("Pa-b-corrected", "D", _c(D, D), D, "corrected")
    R("Pa-b", "DX", _c(D, X), D)
    R("Pa-b", "DX", _c(X, D), D)
    R("Pa-b", "D", _c(_t(D, I), _t(I, D)), _c(_t(I, D), _t(D, I)))
    R("Pa-c", "X", _c(_t(X, I), _t(I, X), _t(X, I)), _c(_t(I, X), _t(X, I), _t(I, X)))
    R("Pa-d", "XD", _c(_t(X, I), _t(I, D), _t(X, I)), _c(_t(I, X), _t(D, I), _t(I, X)))
    R("Pa-e-corrected", "XE", _c(_t(I, eb), X), _t(eb, I), "corrected")
    R("Pa-e", "XE", _c(X, _t(I, et)), _t(et, I))
    R("Pa-f", "DE", _c(_t(I, eb), D, _t(I, et)), I)
    R("Pa-f-corrected", "DE", _c(_t(eb, I), D, _t(et, I)), I, "corrected")
    R("Pa-f", "DE", _c(D, _t(I, et, eb), D), D)
    R("Pa-g", "F", _c(pp, pm), I)
    R("Pa-g", "F", _c(pm, pp), I)
    for phi in (pp, pm):
        R("Pa-h", "FX", _c(_t(phi, I), X), _c(X, _t(I, phi)))
        R("Pa-h", "FX", _c(_t(I, phi), X), _c(X, _t(phi, I)))
        R("Pa-i-corrected", "FE", _c(phi, et), et, "corrected")
        R("Pa-i-corrected", "FE", _c(eb, phi), eb, "corrected")
        R("Pa-j", "FD", _c(_t(phi, phi), D), _c(D, _t(phi, phi)))
    # Brauer category
    R("Br-a", "X", _c(X, X), i2)
    R("Br-a", "C", _c(cap, cup), beta(i0))
    R("Br-a", "XC", _c(X, cup), cup)
    R("Br-a", "XC", _c(cap, X), cap)
    R("Br-b", "X", _c(_t(X, I), _t(I, X), _t(X, I)), _c(_t(I, X), _t(X, I), _t(I, X)))
    R("Br-c", "C", _c(_t(I, cap), _t(cup, I)), I)
    R("Br-c", "C", _c(_t(cap, I), _t(I, cup)), I)
    R("Br-d", "XC", _c(_t(X, I), _t(I, cup)), _c(_t(I, X), _t(cup, I)))
    R("Br-d", "XC", _c(_t(cap, I), _t(I, X)), _c(_t(I, cap), _t(X, I)))
    R("Br-e", "F", _c(pp, pm), I)
    for phi in (pp, pm):
        R("Br-f", "FX", _c(_t(phi, I), X), _c(X, _t(I, phi)))
        R("Br-f", "FX", _c(_t(I, phi), X), _c(X, _t(phi, I)))
    R("Br-g", "FC", _c(cap, _t(pp, pp)), cap)
    R("Br-g", "FC", _c(_t(pp, pp), cup), cup)
    return rels


_CAT_GENS = {"aPa": set("XDEF"), "aBr": set("XCF"), "aRo": set("XEF"), "aRoBr": set("XCEF")}


def check_category_relations(family: str, max_object: int = 3) -> list:
    """Evaluate each relation whose generators lie in the family, plus its
    tensor products with identities while the arity stays <= max_object."""
    if family not in _CAT_GENS:
        raise ValueError(f"no category presentation for {family}")
    allowed = _CAT_GENS[family]
    out = []
    for label, gens, lhs, rhs, status in _cat_relations():
        if not gens <= allowed:
            continue
        variants = [("", lhs, rhs)]
        for k in range(1, max_object + 1):
            idk = _el(identity(k))
            if max(lhs.diagram.s, lhs.diagram.t) + k <= max_object:
                variants.append((f" (x) I_{k}", _t(lhs, idk), _t(rhs, idk)))
                variants.append((f" I_{k} (x)", _t(idk, lhs), _t(idk, rhs)))
        for tag, L, Rr in variants:
            L2, R2 = L.merged(), Rr.merged()
            ok = (L2.diagram, L2.beta) == (R2.diagram, R2.beta)
            out.append(RelationRecord(family, label, label + tag, status, ok))
    return out


# --- braidings ------------------------------------------------------------------------

def middle_components(a: AffineDiagram, b: AffineDiagram):
    """Classify the closed components made by stacking ordinary a on b.

    Returns (cycles, paths): a path contains a middle vertex that is a
    singleton on one side, a cycle does not.
    """
    m = a.s
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    touches_outer = [False] * m
    dotted = [False] * m
    for diag, inner_side in ((a, BOTTOM), (b, TOP)):
        for blk in diag.blocks:
            inner = [pos for _, side, pos in blk.members if side == inner_side]
            if len(inner) < len(blk.members):
                for pos in inner:
                    touches_outer[pos] = True
            if len(blk.members) == 1 and inner:
                dotted[inner[0]] = True
            for pos in inner[1:]:
                parent[find(pos)] = find(inner[0])
    comps = {}
    for v in range(m):
        comps.setdefault(find(v), []).append(v)
    cycles = paths = 0
    for vs in comps.values():
        if any(touches_outer[v] for v in vs):
            continue
        if any(dotted[v] for v in vs):
            paths += 1
        else:
            cycles += 1
    return cycles, paths


class HomElement:
    """Finite linear combination of ordinary (s, t)-diagrams.

    ``path_weight`` is the scalar for closed components ending in dots;
    ``None`` means the same as ``beta``.
    """

    def __init__(self, s, t, terms, beta, path_weight=None):
        self.s, self.t = s, t
        self.beta = beta
        self.path_weight = path_weight
        self.terms = {d: c for d, c in terms.items() if c != 0}

    def __add__(self, other):
        out = dict(self.terms)
        for d, c in other.terms.items():
            out[d] = out[d] + c if d in out else c
        return self._like(self.s, self.t, out)

    def _like(self, s, t, terms):
        return HomElement(s, t, terms, self.beta, self.path_weight)

    def scale(self, c):
        return self._like(self.s, self.t, {d: c * x for d, x in self.terms.items()})

    def compose(self, other):
        """self o other (other acts first)."""
        out = {}
        for d1, c1 in self.terms.items():
            for d2, c2 in other.terms.items():
                pr = compose(d1, d2)
                c = c1 * c2
                if self.path_weight is None:
                    for _ in range(pr.beta):
                        c = c * self.beta
                else:
                    cycles, paths = middle_components(d1, d2)
                    for _ in range(cycles):
                        c = c * self.beta
                    for _ in range(paths):
                        c = c * self.path_weight
                key = pr.diagram
                out[key] = out[key] + c if key in out else c
        return self._like(other.s, self.t, out)

    def tensor(self, other):
        out = {}
        for d1, c1 in self.terms.items():
            for d2, c2 in other.terms.items():
                key = juxtapose(d1, d2)
                c = c1 * c2
                out[key] = out[key] + c if key in out else c
        return self._like(self.s + other.s, self.t + other.t, out)

    def map_coeffs(self, f):
        return self._like(self.s, self.t, {d: f(c) for d, c in self.terms.items()})

    def __eq__(self, other):
        keys = set(self.terms) | set(other.terms)
        for k in keys:
            a = self.terms.get(k, 0)
            b = other.terms.get(k, 0)
            if not a - b == 0:
                return False
        return True


def _mo_pictures():
    c = canonicalize
    return {
        "id": identity(2),
        "dotR": c(2, 2, blocks=[[("b", 0), ("t", 0)]]),
        "dotL": c(2, 2, blocks=[[("b", 1), ("t", 1)]]),
        "cupcap": c(2, 2, blocks=[[("b", 0), ("b", 1)], [("t", 0), ("t", 1)]]),
        "topArc": c(2, 2, blocks=[[("t", 0), ("t", 1)]]),
        "botArc": c(2, 2, blocks=[[("b", 0), ("b", 1)]]),
        "l": c(2, 2, blocks=[[("b", 0), ("t", 1)]]),
        "r": c(2, 2, blocks=[[("b", 1), ("t", 0)]]),
        "dots": c(2, 2, blocks=[]),
    }


def braiding(category: str, h, one, diagonal=("l", "r"), dots_coeff=None, swap=False):
    """eta (TL) or sigma (Mo) with q^{1/2} = h in the coefficient ring.

    ``swap`` exchanges q^{1/2} and q^{-1/2} (the claimed inverse).
    ``diagonal`` lists the one-strand pictures making up the crossing term
    of sigma; ``dots_coeff`` overrides the four-dots coefficient (negative
    controls).
    """
    hi = h ** -1
    if swap:
        h, hi = hi, h
    pics = _mo_pictures()
    if category == "TL":
        beta = -(h * h) - (hi * hi)
        terms = {pics["id"]: h, pics["cupcap"]: hi}
    elif category == "Mo":
        beta = one - h * h - hi * hi
        terms = {}

        def add(d, c):
            terms[d] = terms[d] + c if d in terms else c

        add(pics["id"], h)
        add(pics["dotR"], -h)
        add(pics["dotL"], -h)
        add(pics["cupcap"], hi)
        add(pics["topArc"], -hi)
        add(pics["botArc"], -hi)
        for name in diagonal:
            add(pics[name], one)
        add(pics["dots"], (h + hi - one) if dots_coeff is None else dots_coeff)
    else:
        raise ValueError("category must be TL or Mo")
    if swap:
        beta = -(hi * hi) - (h * h) if category == "TL" else one - hi * hi - h * h
    return HomElement(2, 2, terms, beta)


def _identity_hom(n, one, beta):
    return HomElement(n, n, {identity(n): one}, beta)


def braiding_checks(category: str, q_spec="generic", diagonal=("l", "r"), dots_coeff=None,
                    path_weight="one") -> dict:
    """Invertibility and Yang-Baxter for eta / sigma.

    ``q_spec`` is 'generic' (Laurent polynomials in q^{1/2}) or a pair
    (h, p) meaning q^{1/2} = h in F_p.  For Motzkin diagrams, closed
    components that end in dots get weight 1 (``path_weight='one'``, the
    dilute convention the braiding needs) or beta (``'beta'``).
    """
    if q_spec == "generic":
        h = MultiLaurent.var(("h",), "h")
        one = MultiLaurent.const(("h",), 1)
    else:
        hv, p = q_spec
        if hv % p == 0:
            raise ValueError("q must be invertible")
        h = Fp(hv, p)
        one = Fp(1, p)
    br = braiding(category, h, one, diagonal, dots_coeff)
    inv = braiding(category, h, one, diagonal, dots_coeff, swap=True)
    beta = br.beta
    pw = one if path_weight == "one" else None
    homs = [br, inv, _identity_hom(1, one, beta), _identity_hom(2, one, beta)]
    for x in homs:
        x.beta = beta
        x.path_weight = pw
    _, _, I1, I2 = homs
    a = br.tensor(I1)
    b = I1.tensor(br)
    yb = a.compose(b).compose(a) == b.compose(a).compose(b)
    return {
        "inverse_left": inv.compose(br) == I2,
        "inverse_right": br.compose(inv) == I2,
        "yang_baxter": yb,
    }

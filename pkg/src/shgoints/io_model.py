"""Molecule and basis parsing, shell construction and tensor persistence.

Lengths are bohr internally; XYZ input in angstrom is converted once at
parse time.

Basis text format::

    # comment
    H
    s 3
      3.42525091  0.15432897
      0.62391373  0.53532814
      0.16885540  0.44463454
    O
    ...

An element line starts a block; each shell is ``L n_prim`` followed by
``n_prim`` lines ``exponent coefficient``.  ``L`` is a letter (s p d f g h i)
or an integer.  A repeated element block replaces the earlier one.

Tensor files are one UTF-8 JSON header line, a newline, then raw
little-endian float64 data in row-major order.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import IntegralTensor, PrimitiveShell, make_shell

log = logging.getLogger(__name__)

BOHR_ANGSTROM = 0.52917721092  # angstrom per bohr
L_MAX = 12
SHELL_LETTERS = "spdfghi"
TENSOR_FORMAT = "shgo-tensor"
TENSOR_VERSION = 1

_SYMBOLS = (
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni Cu Zn "
    "Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba La Ce "
    "Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg Tl Pb Bi Po At Rn "
    "Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl "
    "Mc Lv Ts Og"
).split()
ATOMIC_NUMBER = {s: i + 1 for i, s in enumerate(_SYMBOLS)}


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class TensorFileError(ValueError):
    pass


class ChecksumError(TensorFileError):
    pass


class DimensionError(TensorFileError):
    pass


class TruncationError(TensorFileError):
    pass


def element_symbol(text: str) -> str:
    sym = text.strip()
    sym = sym[:1].upper() + sym[1:].lower()
    if sym not in ATOMIC_NUMBER:
        raise KeyError(text)
    return sym


# --------------------------------------------------------------------------
# molecules


@dataclass(frozen=True)
class Atom:
    symbol: str
    Z: int
    xyz: tuple[float, float, float]


@dataclass(frozen=True)
class Molecule:
    atoms: tuple[Atom, ...]
    units: str = "bohr"  # units of the source file; coordinates are always bohr
    comment: str = ""

    def nuclei(self) -> list[tuple[np.ndarray, float]]:
        return [(np.array(a.xyz), float(a.Z)) for a in self.atoms]

    def to_xyz(self) -> str:
        lines = [str(len(self.atoms)), "units=bohr"]
        for a in self.atoms:
            lines.append(f"{a.symbol} {a.xyz[0]!r} {a.xyz[1]!r} {a.xyz[2]!r}")
        return "\n".join(lines) + "\n"


def parse_molecule(text: str) -> Molecule:
    """Parse XYZ text; ``units=angstrom`` in the comment line converts to bohr.

    Without a units flag coordinates are taken as angstrom, as is usual for
    XYZ files.
    """
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("missing atom count", 1)
    try:
        count = int(lines[0].split()[0])
    except ValueError:
        raise ParseError(f"atom count is not an integer: {lines[0].strip()!r}", 1) from None
    if count < 1:
        raise ParseError("atom count must be positive", 1)
    comment = lines[1].strip() if len(lines) > 1 else ""
    units = "angstrom"
    for tok in comment.replace(",", " ").split():
        if tok.lower().startswith("units="):
            units = tok.split("=", 1)[1].lower()
            if units not in ("angstrom", "bohr"):
                raise ParseError(f"unknown units {units!r}", 2)
    scale = 1.0 / BOHR_ANGSTROM if units == "angstrom" else 1.0
    body = [(i + 3, ln) for i, ln in enumerate(lines[2:]) if ln.strip()]
    if len(body) != count:
        where = body[count][0] if len(body) > count else len(lines) + 1
        raise ParseError(f"expected {count} atom lines, found {len(body)}", where)
    atoms = []
    for lineno, ln in body:
        parts = ln.split()
        if len(parts) != 4:
            raise ParseError(f"expected 'Symbol x y z', got {ln.strip()!r}", lineno)
        try:
            sym = element_symbol(parts[0])
        except KeyError:
            raise ParseError(f"unknown element {parts[0]!r}", lineno) from None
        try:
            xyz = [float(v) * scale for v in parts[1:]]
        except ValueError:
            raise ParseError(f"bad coordinate in {ln.strip()!r}", lineno) from None
        if not all(math.isfinite(v) for v in xyz):
            raise ParseError("coordinates must be finite", lineno)
        atoms.append(Atom(sym, ATOMIC_NUMBER[sym], tuple(xyz)))
    return Molecule(tuple(atoms), units, comment)


# --------------------------------------------------------------------------
# basis sets


@dataclass(frozen=True)
class ShellDef:
    l: int
    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]


@dataclass(frozen=True)
class BasisSet:
    shells: dict = field(default_factory=dict)  # symbol -> tuple[ShellDef, ...]

    def to_text(self) -> str:
        out = []
        for sym, defs in self.shells.items():
            out.append(sym)
            for d in defs:
                out.append(f"{SHELL_LETTERS[d.l] if d.l < len(SHELL_LETTERS) else d.l} {len(d.exponents)}")
                for e, c in zip(d.exponents, d.coefficients):
                    out.append(f"  {e!r} {c!r}")
        return "\n".join(out) + "\n"


def _parse_l(tok: str, lineno: int) -> int:
    t = tok.lower()
    if t in SHELL_LETTERS:
        l = SHELL_LETTERS.index(t)
    else:
        try:
            l = int(t)
        except ValueError:
            raise ParseError(f"bad angular momentum {tok!r}", lineno) from None
    if l < 0 or l > L_MAX:
        raise ParseError(f"angular momentum {l} outside 0..{L_MAX}", lineno)
    return l


def parse_basis(text: str) -> BasisSet:
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(n, ln) for n, ln in lines if ln]
    shells: dict[str, tuple] = {}
    current = None
    pending: list = []
    i = 0

    def close():
        if current is not None:
            if current in shells:
                log.warning("element %s defined more than once; the last block wins", current)
            shells[current] = tuple(pending)

    while i < len(lines):
        lineno, ln = lines[i]
        parts = ln.split()
        if len(parts) == 1:
            close()
            try:
                current = element_symbol(parts[0])
            except KeyError:
                raise ParseError(f"unknown element {parts[0]!r}", lineno) from None
            pending = []
            i += 1
            continue
        if current is None:
            raise ParseError("shell given before any element line", lineno)
        if len(parts) != 2:
            raise ParseError(f"expected 'L n_prim', got {ln!r}", lineno)
        l = _parse_l(parts[0], lineno)
        try:
            nprim = int(parts[1])
        except ValueError:
            raise ParseError(f"bad primitive count {parts[1]!r}", lineno) from None
        if nprim < 1:
            raise ParseError("primitive count must be positive", lineno)
        exps, coefs = [], []
        for k in range(nprim):
            if i + 1 + k >= len(lines):
                raise ParseError(f"shell needs {nprim} primitives, found {k}", lineno)
            pl, pline = lines[i + 1 + k]
            vals = pline.split()
            if len(vals) != 2:
                raise ParseError(f"shell needs {nprim} primitives, found {k}", pl)
            try:
                e, c = float(vals[0]), float(vals[1])
            except ValueError:
                raise ParseError(f"bad primitive line {pline!r}", pl) from None
            if not e > 0 or not math.isfinite(e):
                raise ParseError(f"exponent must be positive, got {vals[0]}", pl)
            exps.append(e)
            coefs.append(c)
        pending.append(ShellDef(l, tuple(exps), tuple(coefs)))
        i += 1 + nprim
    close()
    if not shells:
        raise ParseError("basis text defines no elements")
    return BasisSet(shells)


def build_shells(mol: Molecule, basis: BasisSet) -> list[PrimitiveShell]:
    """Normalized shells, atom-major then in basis order."""
    out = []
    for atom in mol.atoms:
        if atom.symbol not in basis.shells:
            raise KeyError(f"basis has no entry for element {atom.symbol}")
        for d in basis.shells[atom.symbol]:
            out.append(make_shell(d.l, atom.xyz, d.exponents, d.coefficients))
    return out


def read_molecule(path) -> Molecule:
    return parse_molecule(Path(path).read_text(encoding="utf-8"))


def read_basis(path) -> BasisSet:
    return parse_basis(Path(path).read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# tensors


def _payload(t: IntegralTensor) -> bytes:
    return np.ascontiguousarray(t.data, dtype="<f8").tobytes()


def write_tensor(tensor: IntegralTensor, path) -> None:
    payload = _payload(tensor)
    header = {
        "format": TENSOR_FORMAT,
        "version": TENSOR_VERSION,
        "rank": tensor.rank,
        "dims": list(tensor.dims),
        "basis": tensor.basis,
        "dtype": "<f8",
        "order": "row-major",
        "metadata": tensor.metadata,
        "checksum": "sha256:" + hashlib.sha256(payload).hexdigest(),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(payload)


def read_tensor(path) -> IntegralTensor:
    raw = Path(path).read_bytes()
    nl = raw.find(b"\n")
    if nl < 0:
        raise TruncationError("tensor file has no header terminator")
    try:
        header = json.loads(raw[:nl].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TensorFileError(f"unreadable tensor header: {exc}") from None
    if header.get("format") != TENSOR_FORMAT:
        raise TensorFileError("not a tensor file")
    dims = [int(d) for d in header["dims"]]
    if len(dims) != header["rank"] or header["rank"] not in (2, 4):
        raise DimensionError(f"rank {header['rank']} inconsistent with dims {dims}")
    payload = raw[nl + 1:]
    expected = 8 * math.prod(dims)
    if len(payload) < expected:
        raise TruncationError(f"payload has {len(payload)} bytes, dims need {expected}")
    if len(payload) > expected:
        raise DimensionError(f"payload has {len(payload)} bytes, dims need {expected}")
    digest = "sha256:" + hashlib.sha256(payload).hexdigest()
    if digest != header["checksum"]:
        raise ChecksumError("payload checksum does not match header")
    data = np.frombuffer(payload, dtype="<f8").reshape(dims).astype(float)
    return IntegralTensor(data, basis=header["basis"], metadata=header.get("metadata", {}))


def export_csv(tensor: IntegralTensor, path) -> None:
    """Rank 2 as a plain matrix; rank 4 as ``i,j,k,l,value`` rows.  17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        if tensor.rank == 2:
            for row in tensor.data:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        else:
            fh.write("i,j,k,l,value\n")
            for idx, v in np.ndenumerate(tensor.data):
                fh.write(",".join(map(str, idx)) + f",{v:.17g}\n")

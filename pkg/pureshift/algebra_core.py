"""
This file is part of pureshift.
Copyright (c) 2026 the pureshift authors.

This program is free software: you can redistribute it and/or modify it under
the terms of the GNU General Public License as published by the Free Software
Foundation.
This program is distributed in the hope that it will be useful, but WITHOUT
ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with
this program. If not, see <http://www.gnu.org/licenses/>.
"""

from dataclasses import dataclass
from math import ceil, sqrt
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as spla

from exceptions import ShapeMismatchError

Scalar = Union[int, float, complex]


@dataclass(frozen=True)
class AlgebraSignature:
    """block sizes (n_1, ..., n_k) of ℬ = M_{n_1} ⊕ ... ⊕ M_{n_k}"""
    block_dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if not dims:
            raise ShapeMismatchError("signature needs at least one block")
        if any(d < 1 for d in dims):
            raise ShapeMismatchError(f"block dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    def __len__(self):
        return len(self.block_dims)

    def __iter__(self):
        return iter(self.block_dims)

    def __str__(self):
        return " ⊕ ".join("ℂ" if d == 1 else f"M{d}" for d in self.block_dims)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def _check_signature(a, b):
    if a.signature != b.signature:
        raise ShapeMismatchError(f"signature mismatch: {a.signature} vs {b.signature}")


class AlgebraElement:
    __slots__ = ("signature", "blocks")

    def __init__(self, signature: AlgebraSignature, blocks: Sequence[np.ndarray]):
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != len(signature):
            raise ShapeMismatchError(f"expected {len(signature)} blocks, got {len(blocks)}")
        for d, b in zip(signature, blocks):
            if b.shape != (d, d):
                raise ShapeMismatchError(f"block of shape {b.shape} does not fit M{d}")
        self.signature = signature
        self.blocks = blocks

    @classmethod
    def zero(cls, signature: AlgebraSignature) -> "AlgebraElement":
        return cls(signature, [np.zeros((d, d)) for d in signature])

    @classmethod
    def identity(cls, signature: AlgebraSignature) -> "AlgebraElement":
        return cls(signature, [np.eye(d) for d in signature])

    @classmethod
    def scalar(cls, signature: AlgebraSignature, c: Scalar) -> "AlgebraElement":
        return cls(signature, [c * np.eye(d) for d in signature])

    @classmethod
    def random(cls, signature: AlgebraSignature, rng: np.random.Generator) -> "AlgebraElement":
        return cls(signature, [(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / sqrt(2)
                               for d in signature])

    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.signature, [b.conj().T for b in self.blocks])

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_signature(self, other)
        return AlgebraElement(self.signature, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_signature(self, other)
        return AlgebraElement(self.signature, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.signature, [-b for b in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            _check_signature(self, other)
            return AlgebraElement(self.signature, [a @ b for a, b in zip(self.blocks, other.blocks)])
        return AlgebraElement(self.signature, [other * b for b in self.blocks])

    def __rmul__(self, other: Scalar) -> "AlgebraElement":
        return AlgebraElement(self.signature, [other * b for b in self.blocks])

    def norm(self) -> float:
        return max((spla.norm(b, 2) if b.size else 0.0) for b in self.blocks)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(b))) for b in self.blocks)

    def min_eigenvalue(self) -> float:
        """smallest eigenvalue of the hermitian part over all blocks"""
        return min(float(spla.eigvalsh((b + b.conj().T) / 2)[0]) for b in self.blocks)

    def is_positive(self, tol: float = 1e-12) -> bool:
        return self.star().close_to(self, tol) and self.min_eigenvalue() >= -tol

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks))

    def close_to(self, other: "AlgebraElement", tol: float) -> bool:
        return (self - other).max_abs() <= tol

    def __repr__(self):
        return f"AlgebraElement({self.signature}, {[b.tolist() for b in self.blocks]})"


class ModuleVector:
    """
    element of the Hilbert ℬ-module ℬⁿ

    Block i is stored as the (n·n_i) × n_i column stack of the i-th blocks of the n entries,
    so ⟨x, y⟩ is X_i* Y_i blockwise and right multiplication by b is X_i b_i.
    """
    __slots__ = ("signature", "rank", "columns")

    def __init__(self, signature: AlgebraSignature, rank: int, columns: Sequence[np.ndarray]):
        columns = tuple(_frozen(c) for c in columns)
        if rank < 0:
            raise ShapeMismatchError(f"rank must be >= 0, got {rank}")
        if len(columns) != len(signature):
            raise ShapeMismatchError(f"expected {len(signature)} column blocks, got {len(columns)}")
        for d, c in zip(signature, columns):
            if c.shape != (rank * d, d):
                raise ShapeMismatchError(f"column block of shape {c.shape} does not fit rank {rank} over M{d}")
        self.signature = signature
        self.rank = rank
        self.columns = columns

    @classmethod
    def from_entries(cls, signature: AlgebraSignature, entries: Sequence[AlgebraElement]) -> "ModuleVector":
        for e in entries:
            if e.signature != signature:
                raise ShapeMismatchError(f"entry over {e.signature} in a module over {signature}")
        columns = []
        for i, d in enumerate(signature):
            if entries:
                columns.append(np.vstack([e.blocks[i] for e in entries]))
            else:
                columns.append(np.zeros((0, d)))
        return cls(signature, len(entries), columns)

    @property
    def entries(self) -> Tuple[AlgebraElement, ...]:
        return tuple(
            AlgebraElement(self.signature, [c[j * d:(j + 1) * d] for c, d in zip(self.columns, self.signature)])
            for j in range(self.rank)
        )

    @classmethod
    def zero(cls, signature: AlgebraSignature, rank: int) -> "ModuleVector":
        return cls(signature, rank, [np.zeros((rank * d, d)) for d in signature])

    @classmethod
    def generator(cls, signature: AlgebraSignature, rank: int, index: int) -> "ModuleVector":
        """canonical generator e_index (identity of ℬ in entry index)"""
        if not 0 <= index < rank:
            raise ShapeMismatchError(f"generator {index} out of range for rank {rank}")
        columns = []
        for d in signature:
            c = np.zeros((rank * d, d), dtype=complex)
            c[index * d:(index + 1) * d] = np.eye(d)
            columns.append(c)
        return cls(signature, rank, columns)

    @classmethod
    def random(cls, signature: AlgebraSignature, rank: int, rng: np.random.Generator) -> "ModuleVector":
        return cls.from_entries(signature, [AlgebraElement.random(signature, rng) for _ in range(rank)])

    def _check(self, other: "ModuleVector"):
        _check_signature(self, other)
        if self.rank != other.rank:
            raise ShapeMismatchError(f"rank mismatch: {self.rank} vs {other.rank}")

    def inner(self, other: "ModuleVector") -> AlgebraElement:
        self._check(other)
        return AlgebraElement(self.signature, [x.conj().T @ y for x, y in zip(self.columns, other.columns)])

    def norm(self) -> float:
        return sqrt(self.inner(self).norm())

    def right_mul(self, b: AlgebraElement) -> "ModuleVector":
        _check_signature(self, b)
        return ModuleVector(self.signature, self.rank, [c @ bb for c, bb in zip(self.columns, b.blocks)])

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        self._check(other)
        return ModuleVector(self.signature, self.rank, [a + b for a, b in zip(self.columns, other.columns)])

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        self._check(other)
        return ModuleVector(self.signature, self.rank, [a - b for a, b in zip(self.columns, other.columns)])

    def __neg__(self) -> "ModuleVector":
        return ModuleVector(self.signature, self.rank, [-c for c in self.columns])

    def __mul__(self, c: Scalar) -> "ModuleVector":
        return ModuleVector(self.signature, self.rank, [c * col for col in self.columns])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(not np.any(c) for c in self.columns)

    def __repr__(self):
        return f"ModuleVector({self.signature}, rank={self.rank})"


class ModuleOperator:
    """adjointable map ℬᵐ -> ℬⁿ, left multiplication by an n×m matrix over ℬ (block i is n·n_i × m·n_i)"""
    __slots__ = ("signature", "rows", "cols", "blocks")

    def __init__(self, signature: AlgebraSignature, rows: int, cols: int, blocks: Sequence[np.ndarray]):
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != len(signature):
            raise ShapeMismatchError(f"expected {len(signature)} blocks, got {len(blocks)}")
        for d, b in zip(signature, blocks):
            if b.shape != (rows * d, cols * d):
                raise ShapeMismatchError(f"block of shape {b.shape} does not fit a {rows}x{cols} matrix over M{d}")
        self.signature = signature
        self.rows = rows
        self.cols = cols
        self.blocks = blocks

    @classmethod
    def from_entries(cls, signature: AlgebraSignature, matrix: Sequence[Sequence[AlgebraElement]]) -> "ModuleOperator":
        rows = len(matrix)
        cols = len(matrix[0]) if rows else 0
        if any(len(row) != cols for row in matrix):
            raise ShapeMismatchError("ragged operator matrix")
        blocks = []
        for i, d in enumerate(signature):
            if rows and cols:
                blocks.append(np.block([[e.blocks[i] for e in row] for row in matrix]))
            else:
                blocks.append(np.zeros((rows * d, cols * d)))
        return cls(signature, rows, cols, blocks)

    @property
    def entries(self) -> List[List[AlgebraElement]]:
        return [[AlgebraElement(self.signature, [b[j * d:(j + 1) * d, k * d:(k + 1) * d]
                                                 for b, d in zip(self.blocks, self.signature)])
                 for k in range(self.cols)]
                for j in range(self.rows)]

    @classmethod
    def identity(cls, signature: AlgebraSignature, n: int) -> "ModuleOperator":
        return cls(signature, n, n, [np.eye(n * d) for d in signature])

    @classmethod
    def zero(cls, signature: AlgebraSignature, n: int, m: Optional[int] = None) -> "ModuleOperator":
        m = n if m is None else m
        return cls(signature, n, m, [np.zeros((n * d, m * d)) for d in signature])

    @classmethod
    def random(cls, signature: AlgebraSignature, n: int, m: int, rng: np.random.Generator) -> "ModuleOperator":
        return cls.from_entries(signature, [[AlgebraElement.random(signature, rng) for _ in range(m)]
                                            for _ in range(n)])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def apply(self, x: ModuleVector) -> ModuleVector:
        if x.signature != self.signature or x.rank != self.cols:
            raise ShapeMismatchError(f"cannot apply {self.rows}x{self.cols} operator to rank {x.rank} vector")
        return ModuleVector(self.signature, self.rows, [b @ c for b, c in zip(self.blocks, x.columns)])

    __call__ = apply

    def adjoint(self) -> "ModuleOperator":
        return ModuleOperator(self.signature, self.cols, self.rows, [b.conj().T for b in self.blocks])

    def __matmul__(self, other: "ModuleOperator") -> "ModuleOperator":
        _check_signature(self, other)
        if self.cols != other.rows:
            raise ShapeMismatchError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        return ModuleOperator(self.signature, self.rows, other.cols, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def __add__(self, other: "ModuleOperator") -> "ModuleOperator":
        _check_signature(self, other)
        return ModuleOperator(self.signature, self.rows, self.cols, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "ModuleOperator") -> "ModuleOperator":
        _check_signature(self, other)
        return ModuleOperator(self.signature, self.rows, self.cols, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, c: Scalar) -> "ModuleOperator":
        return ModuleOperator(self.signature, self.rows, self.cols, [c * b for b in self.blocks])

    __rmul__ = __mul__

    def norm(self) -> float:
        return max((spla.norm(b, 2) if b.size else 0.0) for b in self.blocks)

    def __repr__(self):
        return f"ModuleOperator({self.signature}, {self.rows}x{self.cols})"


def inner_product(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    return x.inner(y)


def norm(x: ModuleVector) -> float:
    """‖x‖ = ‖⟨x, x⟩‖^{1/2}"""
    return x.norm()


def op_adjoint(t: ModuleOperator) -> ModuleOperator:
    return t.adjoint()


def projection_residual(t: ModuleOperator) -> float:
    """max of ‖t² - t‖ and ‖t* - t‖"""
    if not t.is_square:
        raise ShapeMismatchError(f"projection test needs a square operator, got {t.rows}x{t.cols}")
    return max((t @ t - t).norm(), (t.adjoint() - t).norm())


def unitary_residual(t: ModuleOperator) -> float:
    """max of ‖t*t - 1‖ and ‖tt* - 1‖"""
    if not t.is_square:
        raise ShapeMismatchError(f"unitary test needs a square operator, got {t.rows}x{t.cols}")
    one = ModuleOperator.identity(t.signature, t.rows)
    return max((t.adjoint() @ t - one).norm(), (t @ t.adjoint() - one).norm())


def is_projection(t: ModuleOperator, tol: float = 1e-12) -> bool:
    return projection_residual(t) <= tol


def range_frame(generators: Sequence[ModuleVector], tol: float = 1e-8, atol: float = 1e-13,
                signature: Optional[AlgebraSignature] = None) -> Tuple[List[ModuleVector], ModuleOperator]:
    """
    reduced generating family of the submodule spanned by `generators`

    Per block the generator columns are reduced by an SVD; singular values below
    tol × (largest singular value of that block) or below atol are dropped. The kept left
    singular vectors are packed n_i at a time into frame vectors, so the Gram matrix is a
    projection in M_m(ℬ) whose block traces are the per-block complex dimensions.

    :param generators: vectors of one signature and rank
    :param tol: relative singular value threshold
    :param atol: absolute floor below which a block counts as empty
    :param signature: needed only when generators is empty
    :return: (frame, gram), gram being 0x0 for an empty frame
    """
    if not generators:
        if signature is None:
            raise ShapeMismatchError("an empty generating family needs its signature")
        return [], ModuleOperator.zero(signature, 0)

    signature = generators[0].signature
    rank = generators[0].rank
    for g in generators:
        if g.signature != signature or g.rank != rank:
            raise ShapeMismatchError("generators must share signature and rank")

    bases = []
    for i, d in enumerate(signature):
        cols = np.hstack([g.columns[i] for g in generators])
        if cols.shape[0] == 0:
            bases.append(np.zeros((0, 0), dtype=complex))
            continue
        u, s, _ = spla.svd(cols, full_matrices=False)
        keep = s > max(tol * (s[0] if s.size else 0.0), atol)
        bases.append(u[:, keep])

    size = max(ceil(b.shape[1] / d) for b, d in zip(bases, signature))
    frame = []
    for k in range(size):
        columns = []
        for b, d in zip(bases, signature):
            c = np.zeros((rank * d, d), dtype=complex)
            part = b[:, k * d:(k + 1) * d]
            c[:, :part.shape[1]] = part
            columns.append(c)
        frame.append(ModuleVector(signature, rank, columns))

    gram = ModuleOperator.from_entries(signature, [[a.inner(b) for b in frame] for a in frame]) \
        if frame else ModuleOperator.zero(signature, 0)
    return frame, gram


def frame_dims(frame: Sequence[ModuleVector], gram: ModuleOperator) -> Tuple[int, ...]:
    """per-block complex dimension of the span of a frame from range_frame"""
    return tuple(int(round(np.trace(b).real)) for b in gram.blocks)

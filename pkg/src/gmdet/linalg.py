"""Dense exact linear algebra over a FunctionField.

Matrices are lists of rows of FieldElem.  Elimination is Gauss-Jordan
over the field with a "smallest pivot" rule; every intermediate entry is
a canonical fraction, so expression swell is bounded by the gcds.
"""

from .errors import PreconditionError


class SingularMatrix(PreconditionError):
    pass


def zeros(field, n, m=None):
    m = n if m is None else m
    return [[field.zero] * m for _ in range(n)]


def identity(field, n):
    out = zeros(field, n)
    for i in range(n):
        out[i][i] = field.one
    return out


def scalar(field, n, c):
    out = zeros(field, n)
    c = field(c)
    for i in range(n):
        out[i][i] = c
    return out


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_neg(A):
    return [[-a for a in row] for row in A]


def mat_scale(A, c):
    return [[a * c for a in row] for row in A]


def mat_mul(A, B):
    if not A:
        return []
    field = A[0][0].field if A[0] else None
    cols = list(zip(*B))
    out = []
    for row in A:
        new = []
        for col in cols:
            acc = None
            for a, b in zip(row, col):
                if a and b:
                    acc = a * b if acc is None else acc + a * b
            new.append(acc if acc is not None else (field.zero if field else b.field.zero))
        out.append(new)
    return out


def mat_vec(A, v):
    out = []
    for row in A:
        acc = None
        for a, b in zip(row, v):
            if a and b:
                acc = a * b if acc is None else acc + a * b
        out.append(acc if acc is not None else v[0].field.zero)
    return out


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_scale(v, c):
    return [a * c for a in v]


def transpose(A):
    return [list(r) for r in zip(*A)]


def trace(A):
    total = A[0][0].field.zero
    for i in range(len(A)):
        total = total + A[i][i]
    return total


def commutator(A, B):
    return mat_sub(mat_mul(A, B), mat_mul(B, A))


def is_zero_matrix(A):
    return all(not a for row in A for a in row)


def _size(f):
    return len(f.num) + len(f.den)


def rref(A):
    """Reduced row echelon form; returns (R, pivot columns)."""
    M = [list(r) for r in A]
    nrows = len(M)
    ncols = len(M[0]) if M else 0
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        best = None
        for i in range(row, nrows):
            if M[i][col]:
                if best is None or _size(M[i][col]) < _size(M[best][col]):
                    best = i
        if best is None:
            continue
        M[row], M[best] = M[best], M[row]
        inv = M[row][col].inverse()
        M[row] = [x * inv if x else x for x in M[row]]
        piv = M[row]
        for i in range(nrows):
            if i != row and M[i][col]:
                c = M[i][col]
                M[i] = [x - c * p if p else x for x, p in zip(M[i], piv)]
        pivots.append(col)
        row += 1
    return M, pivots


def rank(A):
    return len(rref(A)[1]) if A else 0


def solve(A, b):
    """Unique solution of A x = b for square nonsingular A (b a vector)."""
    n = len(A)
    aug = [list(A[i]) + [b[i]] for i in range(n)]
    R, piv = rref(aug)
    if len(piv) != n or piv[-1] == n:
        raise SingularMatrix("singular system")
    return [R[i][n] for i in range(n)]


def solve_affine(A, b):
    """Particular solution (free variables zero) and nullspace basis of A x = b.

    Returns None when the system is inconsistent.
    """
    field = b[0].field if b else A[0][0].field
    nrows = len(A)
    ncols = len(A[0]) if A else 0
    aug = [list(A[i]) + [b[i]] for i in range(nrows)]
    R, piv = rref(aug)
    if piv and piv[-1] == ncols:
        return None
    x = [field.zero] * ncols
    for i, c in enumerate(piv):
        x[c] = R[i][ncols]
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for i, c in enumerate(piv):
            v[c] = -R[i][f]
        basis.append(v)
    return x, basis


def nullspace(A):
    field = A[0][0].field
    sol = solve_affine(A, [field.zero] * len(A))
    return sol[1]


def inverse(A):
    n = len(A)
    field = A[0][0].field
    aug = [list(A[i]) + [field.one if j == i else field.zero for j in range(n)] for i in range(n)]
    R, piv = rref(aug)
    if len(piv) < n or piv[n - 1] != n - 1:
        raise SingularMatrix("matrix is singular")
    return [R[i][n:] for i in range(n)]


def det(A):
    """Determinant by elimination, tracking pivots."""
    n = len(A)
    if n == 0:
        raise ValueError("empty matrix")
    field = A[0][0].field
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    M = [list(r) for r in A]
    d = field.one
    for col in range(n):
        piv = next((i for i in range(col, n) if M[i][col]), None)
        if piv is None:
            return field.zero
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            d = -d
        p = M[col][col]
        d = d * p
        inv = p.inverse()
        for i in range(col + 1, n):
            if M[i][col]:
                c = M[i][col] * inv
                M[i] = [x - c * y if y else x for x, y in zip(M[i], M[col])]
    return d


def charpoly(A):
    """Coefficients c_0..c_n of det(λI − A) by Faddeev-LeVerrier (c_n = 1)."""
    n = len(A)
    field = A[0][0].field
    coeffs = [field.zero] * (n + 1)
    coeffs[n] = field.one
    M = zeros(field, n)
    for k in range(1, n + 1):
        M = mat_mul(A, M)
        for i in range(n):
            M[i][i] = M[i][i] + coeffs[n - k + 1]
        coeffs[n - k] = -trace(mat_mul(A, M)) / k
    return coeffs

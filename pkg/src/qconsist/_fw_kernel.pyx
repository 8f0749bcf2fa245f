# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled solver kernel. Contract and semantics: see ``_fw_fallback``.

The hot loop is the Frank-Wolfe iteration: assemble the gradient operator
from the row-sparse Pauli table, take its minimum eigenvector (LAPACK
zheevd, called directly), and move along the segment with the exact line
search. Everything runs without the GIL on preallocated buffers.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt
from libc.string cimport memset
from scipy.linalg.cython_lapack cimport zheevd

NAME = "compiled"

cdef enum:
    C_GAP = 0
    C_ACCEPT = 1
    C_REJECT = -1
    C_BUDGET = 2
    C_STALL = 3

STATUS_GAP = C_GAP
STATUS_ACCEPT = C_ACCEPT
STATUS_REJECT = C_REJECT
STATUS_BUDGET = C_BUDGET
STATUS_STALL = C_STALL


def expectation_image(const cnp.int32_t[:, ::1] cols, const double complex[:, ::1] vals,
                      const double complex[:, ::1] sigma):
    cdef Py_ssize_t d = cols.shape[0]
    cdef Py_ssize_t dim = cols.shape[1]
    out = np.empty(d)
    cdef double[::1] mv = out
    cdef Py_ssize_t p, r
    cdef double complex acc
    with nogil:
        for p in range(d):
            acc = 0
            for r in range(dim):
                acc = acc + vals[p, r] * sigma[cols[p, r], r]
            mv[p] = acc.real
    return out


def fw_run(const cnp.int32_t[:, ::1] cols, const double complex[:, ::1] vals,
           const double[::1] target, double complex[:, ::1] sigma, double[::1] aim,
           int max_iters, double gap_tol, double dist_tol,
           double reject_thr=0.0, bint record=False):
    cdef Py_ssize_t d = cols.shape[0]
    cdef Py_ssize_t dim = cols.shape[1]
    cdef int idim = <int> dim
    cdef int info = 0, lwork = -1, lrwork = -1, liwork = -1, minus1 = -1
    cdef char jobz = b'V', uplo = b'L'

    gbuf = np.empty(dim * dim, dtype=np.complex128)
    wbuf = np.empty(dim, dtype=np.float64)
    rbuf = np.empty(d, dtype=np.float64)
    avbuf = np.empty(d, dtype=np.float64)
    cdef double complex[::1] G = gbuf
    cdef double[::1] W = wbuf
    cdef double[::1] res = rbuf
    cdef double[::1] av = avbuf

    # workspace query
    cdef double complex wkopt
    cdef double rwkopt
    cdef int iwkopt
    zheevd(&jobz, &uplo, &idim, &G[0], &idim, &W[0], &wkopt, &minus1,
           &rwkopt, &minus1, &iwkopt, &minus1, &info)
    if info != 0:
        raise RuntimeError(f"zheevd workspace query failed: info={info}")
    lwork = <int> wkopt.real
    lrwork = <int> rwkopt
    liwork = iwkopt
    workbuf = np.empty(lwork, dtype=np.complex128)
    rworkbuf = np.empty(max(lrwork, 1), dtype=np.float64)
    iworkbuf = np.empty(max(liwork, 1), dtype=np.intc)
    cdef double complex[::1] work = workbuf
    cdef double[::1] rwork = rworkbuf
    cdef int[::1] iwork = iworkbuf

    objh = np.empty(max_iters if record else 0, dtype=np.float64)
    gaph = np.empty(max_iters if record else 0, dtype=np.float64)
    cdef double[::1] objv = objh
    cdef double[::1] gapv = gaph

    cdef double best_lb2 = 0.0, gap = 0.0, ub2 = 0.0
    cdef double reject2 = reject_thr * reject_thr if reject_thr > 0 else -1.0
    cdef int status = C_BUDGET
    cdef int it = 0
    cdef bint failed = False

    cdef Py_ssize_t p, r, c
    cdef double c2, lb2, dd, rd, dlt, eta, om
    cdef double complex acc, ur

    with nogil:
        while it < max_iters:
            ub2 = 0.0
            for p in range(d):
                res[p] = aim[p] - target[p]
                ub2 += res[p] * res[p]
            if sqrt(ub2) <= dist_tol:
                status = C_ACCEPT
                break

            # gradient operator in Fortran layout: G[c*dim + r] = G_{rc}
            memset(&G[0], 0, dim * dim * sizeof(double complex))
            for p in range(d):
                c2 = 2.0 * res[p]
                if c2 != 0.0:
                    for r in range(dim):
                        G[cols[p, r] * dim + r] = G[cols[p, r] * dim + r] + c2 * vals[p, r]
            zheevd(&jobz, &uplo, &idim, &G[0], &idim, &W[0], &work[0], &lwork,
                   &rwork[0], &lrwork, &iwork[0], &liwork, &info)
            if info != 0:
                failed = True
                break

            # G[0:dim] now holds the minimum eigenvector u
            gap = 0.0
            for p in range(d):
                acc = 0
                for r in range(dim):
                    acc = acc + G[r].conjugate() * vals[p, r] * G[cols[p, r]]
                av[p] = acc.real
                gap += res[p] * (aim[p] - av[p])
            gap *= 2.0
            if record:
                objv[it] = ub2
                gapv[it] = gap
            it += 1

            lb2 = ub2 - gap
            if lb2 > best_lb2:
                best_lb2 = lb2
            if reject2 >= 0.0 and best_lb2 > reject2:
                status = C_REJECT
                break
            if gap <= gap_tol:
                status = C_GAP
                break

            dd = 0.0
            rd = 0.0
            for p in range(d):
                dlt = av[p] - aim[p]
                dd += dlt * dlt
                rd += res[p] * dlt
            eta = 0.0 if dd <= 0.0 else -rd / dd
            if eta > 1.0:
                eta = 1.0
            if eta <= 0.0:
                status = C_STALL
                break
            om = 1.0 - eta
            for r in range(dim):
                ur = G[r]
                for c in range(dim):
                    sigma[r, c] = om * sigma[r, c] + eta * ur * G[c].conjugate()
            for p in range(d):
                aim[p] = om * aim[p] + eta * av[p]

        ub2 = 0.0
        for p in range(d):
            res[p] = aim[p] - target[p]
            ub2 += res[p] * res[p]

    if failed:
        raise RuntimeError(f"zheevd failed: info={info}")

    dist = sqrt(ub2)
    lower = sqrt(best_lb2) if best_lb2 > 0 else 0.0
    return (
        float(dist),
        float(lower),
        float(gap),
        it,
        status,
        objh[:it].copy() if record else None,
        gaph[:it].copy() if record else None,
    )

# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled solver kernels; see ``_pykernels`` for the reference semantics."""
from libc.math cimport exp
from libc.stdlib cimport malloc, free

ctypedef long long i64


cdef struct State:
    i64 g
    i64 k
    const i64* rows       # g x k, row-major
    const i64* base
    double lam
    i64* z
    i64 ztotal
    i64* rowsum
    i64* counts
    double* ratios
    i64 ntotal


cdef int state_init(State* st, const i64[:, ::1] combos, const i64[::1] base, i64[::1] counts, double lam) nogil:
    cdef i64 r, c
    st.g = combos.shape[0]
    st.k = combos.shape[1]
    st.rows = &combos[0, 0]
    st.base = &base[0]
    st.lam = lam
    st.counts = &counts[0]
    st.z = <i64*> malloc(st.k * sizeof(i64))
    st.rowsum = <i64*> malloc(st.g * sizeof(i64))
    st.ratios = <double*> malloc(st.g * sizeof(double))
    if st.z == NULL or st.rowsum == NULL or st.ratios == NULL:
        return -1
    for c in range(st.k):
        st.z[c] = 0
    st.ztotal = 0
    st.ntotal = 0
    for r in range(st.g):
        st.rowsum[r] = 0
        for c in range(st.k):
            st.z[c] += st.counts[r] * st.rows[r * st.k + c]
            st.rowsum[r] += st.rows[r * st.k + c]
        st.ratios[r] = <double> st.counts[r] / <double> st.base[r]
        st.ntotal += st.counts[r]
    for c in range(st.k):
        st.ztotal += st.z[c]
    return 0


cdef void state_free(State* st) nogil:
    free(st.z)
    free(st.rowsum)
    free(st.ratios)


cdef double variance(State* st, i64 j, double rj) nogil:
    cdef i64 i
    cdef double acc = 0.0, mean, d
    for i in range(st.g):
        acc += rj if i == j else st.ratios[i]
    mean = acc / <double> st.g
    acc = 0.0
    for i in range(st.g):
        d = (rj if i == j else st.ratios[i]) - mean
        acc += d * d
    return acc / <double> st.g


cdef double evaluate_move(State* st, i64 j, i64 value) nogil:
    cdef i64 i, delta, total, imb = 0, t
    cdef const i64* row
    if j < 0:
        for i in range(st.k):
            t = st.k * st.z[i] - st.ztotal
            imb += t if t >= 0 else -t
        return <double> imb / <double> st.k + st.lam * variance(st, -1, 0.0)
    delta = value - st.counts[j]
    row = st.rows + j * st.k
    total = st.ztotal + delta * st.rowsum[j]
    for i in range(st.k):
        t = st.k * (st.z[i] + delta * row[i]) - total
        imb += t if t >= 0 else -t
    return <double> imb / <double> st.k + st.lam * variance(st, j, <double> value / <double> st.base[j])


cdef void apply_move(State* st, i64 j, i64 value) nogil:
    cdef i64 i, delta = value - st.counts[j]
    cdef const i64* row = st.rows + j * st.k
    for i in range(st.k):
        st.z[i] += delta * row[i]
    st.ztotal += delta * st.rowsum[j]
    st.ntotal += delta
    st.counts[j] = value
    st.ratios[j] = <double> value / <double> st.base[j]


def evaluate(const i64[:, ::1] combos, const i64[::1] base, i64[::1] counts, double lam):
    cdef State st
    cdef double f
    if state_init(&st, combos, base, counts, lam) != 0:
        state_free(&st)
        raise MemoryError()
    f = evaluate_move(&st, -1, 0)
    state_free(&st)
    return f


def descend(const i64[:, ::1] combos, const i64[::1] base, const i64[::1] lower, const i64[::1] upper,
            i64[::1] counts, const i64[::1] steps, i64 max_evals, double lam, i64 budget, double[::1] trace):
    cdef State st
    cdef i64 evals = 0, si, j, cur, best_v, v, side, step
    cdef double f, best_f, fv
    cdef bint improved, tracing = trace.shape[0] > 0, done = False
    if state_init(&st, combos, base, counts, lam) != 0:
        state_free(&st)
        raise MemoryError()
    with nogil:
        f = evaluate_move(&st, -1, 0)
        for si in range(steps.shape[0]):
            step = steps[si]
            while True:
                improved = False
                for j in range(st.g):
                    cur = st.counts[j]
                    best_f = f
                    best_v = cur
                    for side in range(2):
                        if side == 0:
                            v = cur - step
                            if v < lower[j]:
                                v = lower[j]
                        else:
                            v = cur + step
                            if v > upper[j]:
                                v = upper[j]
                        if v == cur:
                            continue
                        if budget >= 0 and st.ntotal - cur + v > budget:
                            continue
                        if evals >= max_evals:
                            break
                        fv = evaluate_move(&st, j, v)
                        evals += 1
                        if fv < best_f:
                            best_f = fv
                            best_v = v
                        if tracing:
                            trace[evals - 1] = best_f
                    if best_v != cur:
                        apply_move(&st, j, best_v)
                        f = best_f
                        improved = True
                    if evals >= max_evals:
                        break
                if evals >= max_evals:
                    done = True
                    break
                if not improved:
                    break
            if done:
                break
    state_free(&st)
    return evals, f


def anneal(const i64[:, ::1] combos, const i64[::1] base, const i64[::1] lower, const i64[::1] upper,
           i64[::1] counts, const i64[::1] steps, double lam, i64 budget,
           const i64[::1] coords, const i64[::1] step_idx, const i64[::1] signs,
           const double[::1] uniforms, const double[::1] temps):
    cdef State st
    cdef i64 evals = 0, it, j, cur, v, r, n = coords.shape[0]
    cdef double f, fv, d, best_f
    cdef i64* best = <i64*> malloc(counts.shape[0] * sizeof(i64))
    if best == NULL:
        raise MemoryError()
    if state_init(&st, combos, base, counts, lam) != 0:
        state_free(&st)
        free(best)
        raise MemoryError()
    with nogil:
        f = evaluate_move(&st, -1, 0)
        best_f = f
        for r in range(st.g):
            best[r] = st.counts[r]
        for it in range(n):
            j = coords[it]
            cur = st.counts[j]
            v = cur + signs[it] * steps[step_idx[it]]
            if v < lower[j]:
                v = lower[j]
            if v > upper[j]:
                v = upper[j]
            if v == cur:
                continue
            if budget >= 0 and st.ntotal - cur + v > budget:
                continue
            fv = evaluate_move(&st, j, v)
            evals += 1
            d = fv - f
            if d <= 0.0 or uniforms[it] < exp(-d / temps[it]):
                apply_move(&st, j, v)
                f = fv
                if f < best_f:
                    best_f = f
                    for r in range(st.g):
                        best[r] = st.counts[r]
        for r in range(st.g):
            counts[r] = best[r]
    state_free(&st)
    free(best)
    return evals, best_f

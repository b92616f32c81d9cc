# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term-map kernels; mirrors ``_kernel_py`` (see there for the
key/slot encoding).  Coefficients stay exact Python Fractions; the win over
the pure backend is in the merge loops, not the arithmetic."""

BACKEND_NAME = "cython"


cpdef tuple mul_key(tuple k1, tuple k2):
    cdef Py_ssize_t i = 0, j = 0, n1 = len(k1), n2 = len(k2)
    cdef list out
    cdef object s1, s2, v1, v2, v
    if n1 == 0:
        return k2
    if n2 == 0:
        return k1
    out = []
    while i < n1 and j < n2:
        s1 = (<tuple>k1[i])[0]
        s2 = (<tuple>k2[j])[0]
        if s1 == s2:
            v1 = (<tuple>k1[i])[1]
            v2 = (<tuple>k2[j])[1]
            v = v1 + v2
            if v:
                out.append((s1, v))
            i += 1
            j += 1
        elif s1 < s2:
            out.append(k1[i])
            i += 1
        else:
            out.append(k2[j])
            j += 1
    while i < n1:
        out.append(k1[i])
        i += 1
    while j < n2:
        out.append(k2[j])
        j += 1
    return tuple(out)


cpdef add_into(dict acc, dict terms, object factor):
    cdef object key, c, v
    if not factor:
        return
    for key, c in terms.items():
        v = acc.get(key)
        if v is None:
            acc[key] = c * factor
        else:
            v = v + c * factor
            if v:
                acc[key] = v
            else:
                del acc[key]


cpdef dict mul_single(dict terms, tuple key, object coeff):
    cdef dict out = {}
    cdef object k, c
    if not coeff:
        return out
    if len(key) == 0:
        for k, c in terms.items():
            out[k] = c * coeff
        return out
    for k, c in terms.items():
        out[mul_key(<tuple>k, key)] = c * coeff
    return out


cpdef dict mul_terms(dict a, dict b):
    cdef dict out = {}
    cdef object ka, ca, kb, cb, k, v
    if not a or not b:
        return out
    if len(a) > len(b):
        a, b = b, a
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = mul_key(<tuple>ka, <tuple>kb)
            v = out.get(k)
            if v is None:
                out[k] = ca * cb
            else:
                v = v + ca * cb
                if v:
                    out[k] = v
                else:
                    del out[k]
    return out


cdef tuple _const_slots(tuple cmono):
    cdef list out = []
    cdef object nm, e
    for nm, e in cmono:
        out.append(((1, nm), e))
    return tuple(out)


cpdef dict diff_terms(dict a, long gen):
    cdef dict out = {}
    cdef object key, c, slot, val, nk, nc, v, cmono
    cdef Py_ssize_t idx, n
    cdef int kind
    for key, c in a.items():
        n = len(<tuple>key)
        for idx in range(n):
            slot = (<tuple>(<tuple>key)[idx])[0]
            val = (<tuple>(<tuple>key)[idx])[1]
            kind = <int>(<tuple>slot)[0]
            if kind == 0:
                if (<tuple>slot)[1] != gen:
                    continue
                if val == 1:
                    nk = (<tuple>key)[:idx] + (<tuple>key)[idx + 1:]
                else:
                    nk = (<tuple>key)[:idx] + ((slot, val - 1),) + (<tuple>key)[idx + 1:]
                nc = c * val
            elif kind == 2:
                if (<tuple>slot)[1] != gen:
                    continue
                cmono = (<tuple>slot)[2]
                if <bint>(<tuple>cmono is not None and len(<tuple>cmono) > 0):
                    nk = mul_key(<tuple>key, _const_slots(<tuple>cmono))
                else:
                    nk = key
                nc = c * val
            else:
                continue
            v = out.get(nk)
            if v is None:
                out[nk] = nc
            else:
                v = v + nc
                if v:
                    out[nk] = v
                else:
                    del out[nk]
    return out

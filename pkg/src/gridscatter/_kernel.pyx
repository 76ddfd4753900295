# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled round kernel: decisions of every robot for one shared snapshot.

Works on a dense occupancy grid over the bounding box plus a two-node margin.
Returns None when the box is too large or coordinates overflow int64, so the
caller can fall back to the pure-Python path.
"""

from libc.stdlib cimport malloc, calloc, free
from libc.stdint cimport int64_t, int32_t

cdef int WAIT = 0
cdef int SETTLED = 1
cdef int PSI1 = 2
cdef int PSI2 = 3
cdef int PSI3_WEST = 4
cdef int PSI3_EAST = 5
cdef int PSI4 = 6
cdef int PSI5_NORTH = 7
cdef int PSI5_SOUTH = 8

cdef int64_t MAX_CELLS = 1 << 22
cdef int64_t COORD_LIMIT = 1 << 40


cdef struct Grid:
    int64_t x0
    int64_t y0
    int64_t w
    int64_t h
    int32_t* occ


cdef inline int32_t at(Grid* g, int64_t x, int64_t y) noexcept nogil:
    cdef int64_t gx = x - g.x0
    cdef int64_t gy = y - g.y0
    if gx < 0 or gy < 0 or gx >= g.w or gy >= g.h:
        return 0
    return g.occ[gy * g.w + gx]


cdef inline int64_t cell(Grid* g, int64_t x, int64_t y) noexcept nogil:
    return (y - g.y0) * g.w + (x - g.x0)


cdef inline int direction(int64_t dx, int64_t dy) noexcept nogil:
    if dx < 0:
        return 0
    if dx > 0:
        return 1
    if dy < 0:
        return 2
    return 3


def decide_all(xs, ys):
    cdef Py_ssize_t n = len(xs)
    if n != len(ys):
        raise ValueError("xs and ys differ in length")
    if n == 0:
        raise ValueError("need at least one robot")
    for v in xs:
        if not -COORD_LIMIT < v < COORD_LIMIT:
            return None
    for v in ys:
        if not -COORD_LIMIT < v < COORD_LIMIT:
            return None

    cdef int64_t* x = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t* y = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int* label = <int*> malloc(n * sizeof(int))
    cdef int* has = <int*> calloc(n, sizeof(int))
    cdef int* go = <int*> calloc(n, sizeof(int))
    cdef int64_t* tx = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t* ty = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int* rank = <int*> malloc(n * sizeof(int))
    cdef int* east_most = <int*> calloc(n, sizeof(int))
    cdef int* west_stuck = <int*> calloc(n, sizeof(int))
    cdef int* wm = <int*> calloc(n, sizeof(int))
    cdef int* settled = <int*> calloc(n, sizeof(int))
    cdef int32_t* rowcnt = NULL
    cdef int32_t* best = NULL
    cdef Grid g
    g.occ = NULL
    if (x == NULL or y == NULL or label == NULL or has == NULL or go == NULL or tx == NULL
            or ty == NULL or rank == NULL or east_most == NULL or west_stuck == NULL
            or wm == NULL or settled == NULL):
        free(x); free(y); free(label); free(has); free(go); free(tx); free(ty)
        free(rank); free(east_most); free(west_stuck); free(wm); free(settled)
        raise MemoryError()

    cdef Py_ssize_t i, k
    for i in range(n):
        x[i] = xs[i]
        y[i] = ys[i]

    cdef int64_t xmin = x[0], xmax = x[0], ymin = y[0], ymax = y[0]
    for i in range(1, n):
        if x[i] < xmin: xmin = x[i]
        if x[i] > xmax: xmax = x[i]
        if y[i] < ymin: ymin = y[i]
        if y[i] > ymax: ymax = y[i]

    cdef int64_t rc = 1
    while rc * rc < n:
        rc += 1
    cdef int64_t d = 2 * rc - 1

    cdef bint final = True
    cdef int64_t dx, dy, j, cx, cy, c, yy, above
    cdef bint duplicate = False
    cdef bint band, no_excess, stuck, lifting
    cdef int64_t nuns = 0, top_def = -1, w
    cdef int run, seen_wm
    cdef int32_t b

    try:
        for i in range(n):
            dx = x[i] - xmin
            dy = ymax - y[i]
            if dx % 2 or dy % 2 or dx // 2 >= rc or (dy // 2) * rc + dx // 2 >= n:
                final = False
                break

        g.x0 = xmin - 2
        g.y0 = ymin - 2
        g.w = xmax - xmin + 5
        g.h = ymax - ymin + 5
        if g.w * g.h > MAX_CELLS:
            return None
        g.occ = <int32_t*> calloc(g.w * g.h, sizeof(int32_t))
        best = <int32_t*> malloc(g.w * g.h * sizeof(int32_t))
        rowcnt = <int32_t*> calloc(g.h, sizeof(int32_t))
        if g.occ == NULL or best == NULL or rowcnt == NULL:
            raise MemoryError()
        for i in range(n):
            k = cell(&g, x[i], y[i])
            if g.occ[k] != 0:
                duplicate = True
                break
            g.occ[k] = <int32_t>(i + 1)
        if duplicate:
            raise ValueError("robots must occupy distinct nodes")

        if n == 1 or final:
            return [SETTLED] * n, [0] * n, list(xs), list(ys)

        # ranks within rows, east-most flags, westward mobility
        for i in range(n):
            wm[i] = x[i] > xmin and at(&g, x[i] - 1, y[i]) == 0 and at(&g, x[i] - 2, y[i]) == 0
        for cy in range(g.h):
            run = 0
            seen_wm = 0
            b = -1
            for cx in range(g.w):
                k = g.occ[cy * g.w + cx]
                if k != 0:
                    rank[k - 1] = run
                    # only a robot east of its alternate-node slot hops west
                    if x[k - 1] - xmin <= 2 * run:
                        wm[k - 1] = 0
                    west_stuck[k - 1] = not seen_wm
                    if wm[k - 1]:
                        seen_wm = 1
                    run += 1
                    b = <int32_t>(k - 1)
            rowcnt[cy] = run
            if b >= 0:
                east_most[b] = 1

        band = True
        for i in range(n):
            j = ymax - y[i] + 1
            if j > d or j % 2 == 0:
                band = False
                break

        no_excess = True
        stuck = False
        if band:
            for i in range(n):
                dx = x[i] - xmin
                settled[i] = dx % 2 == 0 and rank[i] == dx // 2
                if not settled[i]:
                    nuns += 1
            for cy in range(g.h):
                if rowcnt[cy] > rc:
                    no_excess = False
            j = 1
            while j <= d:
                yy = ymax - j + 1
                c = rowcnt[yy - g.y0] if yy >= g.y0 else 0
                if c < rc:
                    top_def = j
                    break
                j += 2
            if nuns == 0 and no_excess:
                stuck = True
                for i in range(n):
                    if y[i] != ymax and at(&g, x[i], y[i] + 2) == 0:
                        stuck = False
                        break

        for i in range(n):
            j = ymax - y[i] + 1
            label[i] = WAIT
            if j > d or j % 2 == 0:
                label[i] = PSI2 if j > d else PSI1
                if at(&g, x[i], y[i] + 1) == 0:
                    has[i] = 1; tx[i] = x[i]; ty[i] = y[i] + 1
                elif at(&g, x[i] + 1, y[i]) == 0:
                    has[i] = 1; tx[i] = x[i] + 1; ty[i] = y[i]
                continue
            if not band:
                continue
            if not settled[i]:
                lifting = False
                if nuns == 1 and no_excess and j >= 3 and top_def == j - 2 and east_most[i]:
                    above = rowcnt[y[i] + 2 - g.y0]
                    if x[i] - xmin <= 2 * above:
                        lifting = True
                        if x[i] - xmin == 2 * above:
                            label[i] = PSI4
                            has[i] = 1; tx[i] = x[i]; ty[i] = y[i] + 2
                        else:
                            label[i] = PSI3_EAST
                            has[i] = 1; tx[i] = x[i] + 1; ty[i] = y[i]
                if lifting:
                    continue
                if wm[i]:
                    label[i] = PSI3_WEST
                    has[i] = 1; tx[i] = x[i] - 1; ty[i] = y[i]
                elif west_stuck[i] and at(&g, x[i] + 1, y[i]) == 0 and at(&g, x[i] + 2, y[i]) == 0:
                    label[i] = PSI3_EAST
                    has[i] = 1; tx[i] = x[i] + 1; ty[i] = y[i]
                continue
            if nuns > 0:
                continue
            if stuck:
                if j == top_def + 2 and east_most[i]:
                    label[i] = PSI3_EAST
                    has[i] = 1; tx[i] = x[i] + 1; ty[i] = y[i]
                else:
                    label[i] = SETTLED
                continue
            w = rank[i]
            if w < rc and j != 1 and at(&g, x[i], y[i] + 2) == 0:
                label[i] = PSI4
                has[i] = 1; tx[i] = x[i]; ty[i] = y[i] + 2
            elif w >= rc:
                if j != 1 and top_def != -1 and top_def < j:
                    if at(&g, x[i], y[i] + 2) == 0:
                        label[i] = PSI5_NORTH
                        has[i] = 1; tx[i] = x[i]; ty[i] = y[i] + 2
                elif at(&g, x[i], y[i] - 2) == 0:
                    label[i] = PSI5_SOUTH
                    has[i] = 1; tx[i] = x[i]; ty[i] = y[i] - 2
            else:
                label[i] = SETTLED

        # one claimant per node: west, east, south, north, then (y, x)
        for k in range(g.w * g.h):
            best[k] = -1
        for i in range(n):
            if not has[i]:
                continue
            k = cell(&g, tx[i], ty[i])
            b = best[k]
            if b < 0 or _before(i, b, x, y, tx[i], ty[i]):
                best[k] = <int32_t>i
        for i in range(n):
            go[i] = has[i] and best[cell(&g, tx[i], ty[i])] == i

        out_label = [label[i] for i in range(n)]
        out_go = [go[i] for i in range(n)]
        out_x = [tx[i] if go[i] else x[i] for i in range(n)]
        out_y = [ty[i] if go[i] else y[i] for i in range(n)]
        return out_label, out_go, out_x, out_y
    finally:
        free(x); free(y); free(label); free(has); free(go); free(tx); free(ty)
        free(rank); free(east_most); free(west_stuck); free(wm); free(settled)
        free(g.occ); free(best); free(rowcnt)


cdef inline bint _before(Py_ssize_t a, Py_ssize_t b, int64_t* x, int64_t* y,
                         int64_t tx, int64_t ty) noexcept:
    cdef int ra = direction(tx - x[a], ty - y[a])
    cdef int rb = direction(tx - x[b], ty - y[b])
    if ra != rb:
        return ra < rb
    if y[a] != y[b]:
        return y[a] < y[b]
    return x[a] < x[b]

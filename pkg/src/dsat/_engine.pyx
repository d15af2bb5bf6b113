# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled propagation and conflict-analysis kernel for domains up to 64 states.

This is a drop-in twin of the pure-Python engine (``core``/``propagate``/
``learn``/``heuristics``): same classes, same functions, same deterministic
behavior, with state sets held in 64-bit machine words and the prune-event
records held in C arrays.  The solver selects it automatically when every
variable has at most 64 states; the pure engine remains the reference
implementation and covers larger domains.

Everything observable matches the pure engine: attribute names, the event
tuple layout (materialized on demand through properties), iteration and
tie-breaking order, and floating-point operation order.  The shared policy
helpers (restarts, clause deletion, optional clause minimization) run
unchanged against either engine's objects.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc, PyMem_Realloc

from .learn import LearnResult
from .propagate import Stats as PureStats

cdef extern from *:
    int __builtin_popcountll(unsigned long long)
    int __builtin_clzll(unsigned long long)
    int __builtin_ctzll(unsigned long long)

cdef double RESCALE_LIMIT = 1e100
cdef double RESCALE_FACTOR = 1e-100


cdef inline int _msb(unsigned long long x):
    return 63 - __builtin_clzll(x)

cdef inline int _lsb(unsigned long long x):
    return __builtin_ctzll(x)


cdef class Stats:
    """Search counters; ``copy`` returns the engine-independent snapshot."""

    cdef public long long decisions
    cdef public long long conflicts
    cdef public long long propagations
    cdef public long long learned
    cdef public long long restarts
    cdef public long long deleted

    def copy(self):
        return PureStats(self.decisions, self.conflicts, self.propagations,
                         self.learned, self.restarts, self.deleted)

    def __repr__(self):
        return (f"Stats(decisions={self.decisions}, conflicts={self.conflicts}, "
                f"propagations={self.propagations}, learned={self.learned}, "
                f"restarts={self.restarts}, deleted={self.deleted})")


cdef class Variable:
    """A finite-domain variable and its live solver state.

    Mirrors the pure engine's ``Variable``: ``active`` is the bitmask of
    not-yet-pruned states, ``events`` the stack of live prune events as
    ``(states, level, time, reason)`` tuples ordered by (level, time),
    ``state_watchers``/``watched_mask`` the per-state watcher lists and
    their occupancy mask, and the ``conflict_*`` fields are analysis
    scratch.  Event stack, per-level marks and per-state scores live in C
    arrays; ``events``, ``level_stack``, ``state_score`` and
    ``last_conflict_event`` are materialized views of them.
    """

    cdef public int index
    cdef public int card
    cdef public unsigned long long full
    cdef public unsigned long long active
    cdef public double score
    cdef public unsigned long long conflict_states
    cdef public int last_conflict_state
    cdef public unsigned long long watched_mask
    cdef public list state_watchers
    cdef unsigned long long* ev_states
    cdef int* ev_level
    cdef long long* ev_time
    cdef list ev_reason
    cdef Py_ssize_t ev_len
    cdef Py_ssize_t ev_cap
    cdef int* lvl_marks
    cdef Py_ssize_t ls_len
    cdef Py_ssize_t ls_cap
    cdef Py_ssize_t lc_idx
    cdef double sscore[64]
    cdef dict _literals

    def __cinit__(self, int index, int card):
        self.ev_cap = 16
        self.ev_states = <unsigned long long*>PyMem_Malloc(
            self.ev_cap * sizeof(unsigned long long))
        self.ev_level = <int*>PyMem_Malloc(self.ev_cap * sizeof(int))
        self.ev_time = <long long*>PyMem_Malloc(self.ev_cap * sizeof(long long))
        self.ls_cap = 16
        self.lvl_marks = <int*>PyMem_Malloc(self.ls_cap * sizeof(int))
        if (self.ev_states == NULL or self.ev_level == NULL
                or self.ev_time == NULL or self.lvl_marks == NULL):
            raise MemoryError()

    def __dealloc__(self):
        PyMem_Free(self.ev_states)
        PyMem_Free(self.ev_level)
        PyMem_Free(self.ev_time)
        PyMem_Free(self.lvl_marks)

    def __init__(self, int index, int card):
        if card < 2:
            raise ValueError(f"variable {index} needs cardinality >= 2, got {card}")
        if card > 64:
            raise ValueError("compiled engine supports at most 64 states per variable")
        self.index = index
        self.card = card
        self.full = (<unsigned long long>0 - 1) >> (64 - card)
        self.active = self.full
        self.score = 0.0
        self.conflict_states = 0
        self.last_conflict_state = -1
        self.watched_mask = 0
        self.state_watchers = [[] for _ in range(card)]
        self.ev_reason = []
        self.ev_len = 0
        self.ls_len = 0
        self.lc_idx = -1
        cdef int i
        for i in range(64):
            self.sscore[i] = 0.0
        self._literals = {}

    @property
    def events(self):
        out = []
        cdef Py_ssize_t i
        for i in range(self.ev_len):
            out.append((self.ev_states[i], self.ev_level[i],
                        self.ev_time[i], self.ev_reason[i]))
        return out

    @property
    def level_stack(self):
        cdef Py_ssize_t i
        return [self.lvl_marks[i] for i in range(self.ls_len)]

    @property
    def state_score(self):
        cdef int i
        return [self.sscore[i] for i in range(self.card)]

    @property
    def last_conflict_event(self):
        cdef Py_ssize_t i = self.lc_idx
        if i < 0:
            return None
        return (self.ev_states[i], self.ev_level[i],
                self.ev_time[i], self.ev_reason[i])

    cpdef Literal literal(self, states):
        """Intern the literal with this state set, creating it on first use."""
        lit = self._literals.get(states)
        if lit is None:
            if states <= 0 or states >= self.full:
                raise ValueError("literal states must be a nonempty proper subset")
            lit = Literal(self, states)
            self._literals[states] = lit
        return <Literal>lit

    def __repr__(self):
        return f"Variable({self.index}, card={self.card})"


cdef inline int _ev_push(Variable var, unsigned long long states, int level,
                         long long time, object reason) except -1:
    cdef Py_ssize_t i = var.ev_len
    cdef Py_ssize_t cap
    if i == var.ev_cap:
        cap = var.ev_cap * 2
        var.ev_states = <unsigned long long*>PyMem_Realloc(
            var.ev_states, cap * sizeof(unsigned long long))
        var.ev_level = <int*>PyMem_Realloc(var.ev_level, cap * sizeof(int))
        var.ev_time = <long long*>PyMem_Realloc(var.ev_time, cap * sizeof(long long))
        if var.ev_states == NULL or var.ev_level == NULL or var.ev_time == NULL:
            raise MemoryError()
        var.ev_cap = cap
    var.ev_states[i] = states
    var.ev_level[i] = level
    var.ev_time[i] = time
    var.ev_reason.append(reason)
    var.ev_len = i + 1
    return 0


cdef inline int _mark_level(Variable var, int level) except -1:
    cdef Py_ssize_t i = var.ls_len
    cdef Py_ssize_t cap
    if i == var.ls_cap:
        cap = var.ls_cap * 2
        var.lvl_marks = <int*>PyMem_Realloc(var.lvl_marks, cap * sizeof(int))
        if var.lvl_marks == NULL:
            raise MemoryError()
        var.ls_cap = cap
    var.lvl_marks[i] = level
    var.ls_len = i + 1
    return 0


cdef class Literal:
    """Interned literal: one object per (variable, state set) pair."""

    cdef public Variable var
    cdef public unsigned long long states
    cdef public list watchers

    def __init__(self, Variable var, states):
        self.var = var
        self.states = states
        self.watchers = []

    def __repr__(self):
        return f"Literal(x{self.var.index}:{bin(self.states)})"


cdef class Clause:
    """A disjunction of interned literals over distinct variables."""

    cdef public list literals
    cdef public int watch_a
    cdef public int watch_b
    cdef public bint learned
    cdef public int lbd
    cdef public long long tag

    def __init__(self, list literals, bint learned=False, int lbd=0, long long tag=0):
        self.literals = literals
        self.watch_a = 0
        self.watch_b = 1 if len(literals) > 1 else 0
        self.learned = learned
        self.lbd = lbd
        self.tag = tag

    cpdef int size(self):
        cdef int total = 0
        cdef Literal lit
        for lit in self.literals:
            total += __builtin_popcountll(lit.states)
        return total

    def raw(self):
        return [(lit.var.index, lit.states) for lit in self.literals]

    def __repr__(self):
        kind = "learned" if self.learned else "input"
        return f"Clause({kind}, {self.raw()})"


cdef class SolverState:
    """Everything one solver instance mutates; mirrors the pure engine."""

    cdef public list variables
    cdef public int level
    cdef public long long prune_time
    cdef public list level_saves
    cdef public list time_stack
    cdef public list save_stack
    cdef public Clause conflict
    cdef public int num_asserting
    cdef public list unit_literals
    cdef public list clauses
    cdef public double bump
    cdef public double bump_scale
    cdef public bint latched_unsat
    cdef public Stats stats
    cdef public long long clause_tags
    cdef public list touched_vars
    cdef unsigned long long* q_mask
    cdef Py_ssize_t q_cap
    cdef list q_var
    cdef list q_reason

    def __cinit__(self, list variables, double bump_scale=1.05):
        self.q_cap = 256
        self.q_mask = <unsigned long long*>PyMem_Malloc(
            self.q_cap * sizeof(unsigned long long))
        if self.q_mask == NULL:
            raise MemoryError()

    def __dealloc__(self):
        PyMem_Free(self.q_mask)

    def __init__(self, list variables, double bump_scale=1.05):
        self.variables = variables
        self.level = 0
        self.prune_time = 0
        self.level_saves = []
        self.time_stack = [0]
        self.save_stack = [[]]
        self.conflict = None
        self.num_asserting = 0
        self.unit_literals = []
        self.clauses = []
        self.bump = 1.0
        self.bump_scale = bump_scale
        self.latched_unsat = False
        self.stats = Stats()
        self.clause_tags = 0
        self.touched_vars = []
        self.q_var = []
        self.q_reason = []

    def next_tag(self):
        self.clause_tags += 1
        return self.clause_tags


cdef inline unsigned long long* _q_grow(SolverState state) except NULL:
    cdef Py_ssize_t cap = state.q_cap * 2
    state.q_mask = <unsigned long long*>PyMem_Realloc(
        state.q_mask, cap * sizeof(unsigned long long))
    if state.q_mask == NULL:
        raise MemoryError()
    state.q_cap = cap
    return state.q_mask


def init_state(variables, clauses, double bump_scale=1.05):
    """Build a fresh solver state from (id, cardinality) pairs and clauses."""
    cdef list vars_out = []
    cdef int pos = 0
    for index, card in variables:
        if index != pos:
            raise ValueError("variable ids must be 0..n-1 in order")
        vars_out.append(Variable(index, card))
        pos += 1
    cdef SolverState state = SolverState(vars_out, bump_scale)
    cdef list lits
    for raw in clauses:
        raw = list(raw)
        if not raw:
            state.latched_unsat = True
            continue
        lits = [(<Variable>vars_out[var]).literal(states) for var, states in raw]
        if len(lits) == 1:
            state.unit_literals.append(lits[0])
        else:
            install_clause(state, lits, 0, 1, False)
    return state


def install_clause(SolverState state, list lits, int watch_a, int watch_b,
                   bint learned=False, int lbd=0):
    """Create a clause watching two positions and hook up state watches."""
    state.clause_tags += 1
    cdef Clause clause = Clause(lits, learned, lbd, state.clause_tags)
    clause.watch_a = watch_a
    clause.watch_b = watch_b
    cdef Literal lit
    cdef Variable var
    cdef unsigned long long act
    cdef int idx
    cdef list slist
    cdef int pos
    cdef tuple positions
    if watch_a == watch_b:
        positions = (watch_a,)
    else:
        positions = (watch_a, watch_b)
    for pos in positions:
        lit = <Literal>lits[pos]
        if not lit.watchers:
            var = lit.var
            act = lit.states & var.active
            if act:
                idx = _msb(act)
            else:
                idx = _last_pruned_state(var, lit.states)
            slist = <list>var.state_watchers[idx]
            if not slist:
                var.watched_mask |= (<unsigned long long>1) << idx
            slist.append(lit)
        lit.watchers.append(clause)
    state.clauses.append(clause)
    return clause


def implied(Literal lit):
    """Every active state of the variable is in the literal."""
    return lit.var.active & ~lit.states == 0


def falsified(Literal lit):
    """No active state of the variable is in the literal."""
    return lit.var.active & lit.states == 0


def active_state(Literal lit):
    """Most significant active state inside the literal."""
    cdef unsigned long long act = lit.states & lit.var.active
    if not act:
        raise ValueError("literal has no active state")
    return _msb(act)


cdef inline Py_ssize_t _latest_idx(Variable var, unsigned long long states) except -2:
    cdef Py_ssize_t i = var.ev_len - 1
    while i >= 0:
        if var.ev_states[i] & states:
            return i
        i -= 1
    raise ValueError("no pruned state among the given states")


def latest_event(Variable var, states):
    """Newest prune event touching any of ``states`` (all pruned)."""
    cdef unsigned long long s = states
    if not s:
        raise ValueError("empty state set")
    cdef Py_ssize_t i = _latest_idx(var, s)
    return (var.ev_states[i], var.ev_level[i], var.ev_time[i], var.ev_reason[i])


cdef int _last_pruned_state(Variable var, unsigned long long states) except -1:
    cdef Py_ssize_t i = _latest_idx(var, states)
    return _lsb(var.ev_states[i] & states)


def last_pruned_state(Variable var, states):
    """Among ``states`` (all pruned), the one pruned last (lowest id on ties)."""
    cdef unsigned long long s = states
    if not s:
        raise ValueError("empty state set")
    return _last_pruned_state(var, s)


def reseat(SolverState state):
    """Point the working clock and snapshot list at the current level's."""
    state.prune_time = <long long>state.time_stack[len(state.time_stack) - 1]
    state.level_saves = <list>state.save_stack[len(state.save_stack) - 1]


def checkpoint(SolverState state):
    """Store the working clock back into the current level's checkpoint."""
    state.time_stack[len(state.time_stack) - 1] = state.prune_time


cdef bint _assert(SolverState state, Variable var, unsigned long long states,
                  Clause reason) except? 0:
    cdef list q_var = state.q_var
    cdef list q_reason = state.q_reason
    cdef unsigned long long* q_mask = state.q_mask
    if q_var:
        del q_var[:]
        del q_reason[:]
    cdef Py_ssize_t head = 0
    cdef Py_ssize_t tail = 0
    q_mask[0] = states
    q_var.append(var)
    q_reason.append(reason)
    tail = 1
    cdef int level = state.level
    cdef list saves = state.level_saves
    cdef long long clock = state.prune_time
    cdef long long props = 0
    cdef long long ptime
    cdef unsigned long long mask, active, pruned, new_active, rest, low
    cdef unsigned long long lit_active, ract, other_states, other_active
    cdef object reason_obj
    cdef list all_watchers, watchers, clause_watchers, lits
    cdef list target, rw, rlist
    cdef Literal lit, other, cand, replacement
    cdef Variable rvar, other_var
    cdef Clause clause, conflict
    cdef int tgt, idx, ridx, rpos, pos_a, pos
    cdef Py_ssize_t nlits, li, keep_lit, ncl, ci, keep_cl
    cdef bint moved_is_b
    while head < tail:
        var = <Variable>q_var[head]
        mask = q_mask[head]
        reason_obj = q_reason[head]
        head += 1
        active = var.active
        pruned = active & ~mask
        ptime = clock
        clock += 1
        if not pruned:
            continue
        _ev_push(var, pruned, level, ptime, reason_obj)
        if level:
            if var.ls_len == 0 or var.lvl_marks[var.ls_len - 1] != level:
                _mark_level(var, level)
                saves.append((var, active))
        new_active = active & mask
        var.active = new_active
        rest = pruned & var.watched_mask
        if not rest:
            continue
        all_watchers = var.state_watchers
        while rest:
            low = rest & (0 - rest)
            rest ^= low
            watchers = <list>all_watchers[_msb(low)]
            # compact in place: literals that move their watch or end up
            # watching no clause drop out of this state's list
            nlits = len(watchers)
            li = 0
            keep_lit = 0
            while li < nlits:
                lit = <Literal>watchers[li]
                li += 1
                lit_active = lit.states & new_active
                if lit_active:
                    # literal still has an active state: move its watch there
                    tgt = _msb(lit_active)
                    target = <list>all_watchers[tgt]
                    if not target:
                        var.watched_mask |= (<unsigned long long>1) << tgt
                    target.append(lit)
                    continue
                # watched literal just became falsified: revisit its clauses
                clause_watchers = lit.watchers
                ncl = len(clause_watchers)
                ci = 0
                keep_cl = 0
                conflict = None
                while ci < ncl:
                    clause = <Clause>clause_watchers[ci]
                    ci += 1
                    lits = clause.literals
                    pos_a = clause.watch_a
                    if <Literal>lits[pos_a] is lit:
                        other = <Literal>lits[clause.watch_b]
                        moved_is_b = False
                    else:
                        other = <Literal>lits[pos_a]
                        moved_is_b = True
                    replacement = None
                    rpos = 0
                    for pos in range(<int>len(lits)):
                        cand = <Literal>lits[pos]
                        if cand is other or cand is lit:
                            continue
                        if cand.states & cand.var.active:
                            replacement = cand
                            rpos = pos
                            break
                    if replacement is not None:
                        rw = replacement.watchers
                        if not rw:
                            rvar = replacement.var
                            ract = replacement.states & rvar.active
                            ridx = _msb(ract)
                            rlist = <list>rvar.state_watchers[ridx]
                            if not rlist:
                                rvar.watched_mask |= (<unsigned long long>1) << ridx
                            rlist.append(replacement)
                        rw.append(clause)
                        if moved_is_b:
                            clause.watch_b = rpos
                        else:
                            clause.watch_a = rpos
                        continue        # clause leaves this literal's list
                    clause_watchers[keep_cl] = clause
                    keep_cl += 1
                    other_var = other.var
                    other_active = other_var.active
                    other_states = other.states & other_active
                    if other_states == other_active:
                        continue        # clause satisfied through the other watch
                    if not other_states:
                        conflict = clause
                        break
                    props += 1
                    if tail == state.q_cap:
                        q_mask = _q_grow(state)
                    q_mask[tail] = other.states
                    q_var.append(other_var)
                    q_reason.append(clause)
                    tail += 1
                if conflict is not None:
                    while ci < ncl:     # keep the clauses not yet visited
                        clause_watchers[keep_cl] = clause_watchers[ci]
                        keep_cl += 1
                        ci += 1
                    del clause_watchers[keep_cl:]
                    watchers[keep_lit] = lit
                    keep_lit += 1
                    while li < nlits:   # and the literals not yet visited
                        watchers[keep_lit] = watchers[li]
                        keep_lit += 1
                        li += 1
                    del watchers[keep_lit:]
                    state.conflict = conflict
                    state.prune_time = clock
                    state.stats.propagations += props
                    del q_var[:]
                    del q_reason[:]
                    return False
                del clause_watchers[keep_cl:]
                if clause_watchers:
                    watchers[keep_lit] = lit
                    keep_lit += 1
            del watchers[keep_lit:]
            if not watchers:
                var.watched_mask &= ~low
    state.prune_time = clock
    state.stats.propagations += props
    del q_var[:]
    del q_reason[:]
    return True


def assert_literal(SolverState state, Variable var, states, Clause reason):
    """Prune the variable's active states down to ``states`` and propagate.

    Identical contract to the pure engine: False with ``state.conflict`` set
    when a clause runs out of literals, True at fixpoint otherwise.
    """
    return _assert(state, var, states, reason)


def decide(SolverState state, Variable var, states):
    """Open a new decision level and assert the literal with no reason."""
    state.level += 1
    state.prune_time = 0
    state.level_saves = []
    state.stats.decisions += 1
    cdef bint ok = _assert(state, var, states, None)
    state.time_stack.append(state.prune_time)
    state.save_stack.append(state.level_saves)
    return ok


def open_level(SolverState state):
    """Open an empty decision level (used for already-implied assumptions)."""
    state.level += 1
    state.prune_time = 0
    state.level_saves = []
    state.time_stack.append(0)
    state.save_stack.append(state.level_saves)


cdef int _undecide(SolverState state) except -1:
    cdef int lvl = state.level
    cdef Variable var
    cdef list reasons
    state.time_stack.pop()
    for item in <list>state.save_stack.pop():
        var = <Variable>(<tuple>item)[0]
        var.active = <unsigned long long>(<tuple>item)[1]
        var.ls_len -= 1
        reasons = var.ev_reason
        while var.ev_len and var.ev_level[var.ev_len - 1] == lvl:
            var.ev_len -= 1
            reasons.pop()
    state.level = lvl - 1
    state.prune_time = <long long>state.time_stack[len(state.time_stack) - 1]
    state.level_saves = <list>state.save_stack[len(state.save_stack) - 1]
    return 0


def undecide(SolverState state):
    """Undo the deepest decision level by restoring variable snapshots."""
    if state.level == 0:
        raise ValueError("cannot undo level 0")
    _undecide(state)


def backtrack_to(SolverState state, int target):
    while state.level > target:
        if state.level == 0:
            raise ValueError("cannot undo level 0")
        _undecide(state)


cdef void _rescale(SolverState state):
    cdef Variable v
    cdef int i
    for v in state.variables:
        v.score *= RESCALE_FACTOR
        for i in range(v.card):
            v.sscore[i] *= RESCALE_FACTOR
    state.bump *= RESCALE_FACTOR


cdef void _update_score(Variable var, unsigned long long added, SolverState state):
    cdef double bump = state.bump
    cdef unsigned long long rest = added
    cdef unsigned long long low
    cdef int idx, count = 0
    cdef double new
    cdef bint over = False
    while rest:
        low = rest & (0 - rest)
        rest ^= low
        idx = _msb(low)
        new = var.sscore[idx] + bump
        var.sscore[idx] = new
        if new > RESCALE_LIMIT:
            over = True
        count += 1
    var.score += bump * ((<double>count) / (<double>var.card))
    if over or var.score > RESCALE_LIMIT:
        _rescale(state)


def update_score(Variable var, added, SolverState state):
    """Bump the added states and their variable; rescale everything on overflow."""
    _update_score(var, added, state)


def select_literal(SolverState state, double ratio=0.30):
    """Pick the next decision literal, or None when every domain is a singleton.

    Same policy as the pure engine: variable maximizing score over active
    count (lowest id on ties), then a greedy best-score state slice within
    ``ratio`` of the total score, never the whole active set.
    """
    cdef Variable best_var = None
    cdef double best_ratio = -1.0
    cdef double r, total, running, limit, score
    cdef Variable var
    cdef int n
    cdef unsigned long long rest, low, chosen
    cdef int idx, picked, cap
    cdef double neg[64]
    cdef int idxs[64]
    cdef int count, i, j
    cdef double key
    for var in state.variables:
        n = __builtin_popcountll(var.active)
        if n < 2:
            continue
        r = var.score / n
        if r > best_ratio:
            best_var = var
            best_ratio = r
    if best_var is None:
        return None
    # collect (-score, idx) pairs over the active states, ascending idx
    total = 0.0
    count = 0
    rest = best_var.active
    while rest:
        low = rest & (0 - rest)
        rest ^= low
        idx = _msb(low)
        score = best_var.sscore[idx]
        neg[count] = -score
        idxs[count] = idx
        count += 1
        total += score
    if total <= 0.0:
        idx = _lsb(best_var.active)
        return best_var, (<unsigned long long>1) << idx
    # insertion sort by (-score, idx); keys are distinct since idx is
    for i in range(1, count):
        key = neg[i]
        idx = idxs[i]
        j = i - 1
        while j >= 0 and (neg[j] > key or (neg[j] == key and idxs[j] > idx)):
            neg[j + 1] = neg[j]
            idxs[j + 1] = idxs[j]
            j -= 1
        neg[j + 1] = key
        idxs[j + 1] = idx
    limit = ratio * total
    chosen = 0
    running = 0.0
    picked = 0
    cap = count - 1
    for i in range(count):
        if running > limit or picked == cap:
            break
        chosen |= (<unsigned long long>1) << idxs[i]
        running += -neg[i]
        picked += 1
    return best_var, chosen


cdef int _analyze_literal(Literal lit, SolverState state) except -1:
    cdef Variable var = lit.var
    cdef Py_ssize_t lidx = var.lc_idx
    cdef bint at_conflict = lidx >= 0 and var.ev_level[lidx] == state.level
    cdef unsigned long long added = lit.states & ~var.conflict_states
    cdef unsigned long long inter
    cdef Py_ssize_t i
    if added:
        if not var.conflict_states:
            state.touched_vars.append(var)
        var.conflict_states |= added
        # the newest prune among the added states is the first event from
        # the top that touches them; it displaces the current latest only
        # with a strictly newer stamp
        i = var.ev_len - 1
        while i >= 0:
            inter = var.ev_states[i] & added
            if inter:
                if (lidx < 0 or var.ev_level[i] > var.ev_level[lidx]
                        or (var.ev_level[i] == var.ev_level[lidx]
                            and var.ev_time[i] > var.ev_time[lidx])):
                    var.last_conflict_state = _lsb(inter)
                    var.lc_idx = i
                break
            i -= 1
        _update_score(var, added, state)
    if not at_conflict:
        lidx = var.lc_idx
        if lidx >= 0 and var.ev_level[lidx] == state.level:
            state.num_asserting += 1
    return 0


def analyze_literal(Literal lit, SolverState state):
    """Fold one falsified literal into the implicit conflict clause."""
    _analyze_literal(lit, state)


def learn_asserting(SolverState state, Clause conflict):
    """Turn the conflicting clause into an asserting clause.

    Same resolution loop, scratch discipline and tie-breaking as the pure
    engine; returns the shared ``LearnResult``.
    """
    cdef int level = state.level
    cdef Literal lit
    cdef Variable var, best_var
    cdef object reason
    cdef int best_level, lvl
    cdef long long best_time, last_time
    cdef unsigned long long inter, evinter
    cdef list touched = state.touched_vars
    cdef list literals
    cdef Literal asserting, last_at_level
    cdef int assertion_level
    cdef Py_ssize_t i
    for lit in conflict.literals:
        _analyze_literal(lit, state)
    while state.num_asserting > 1:
        # resolve on the variable holding the overall latest pruned state
        best_var = None
        best_level = -1
        best_time = -1
        for var in touched:
            if var.conflict_states:
                i = var.lc_idx
                lvl = var.ev_level[i]
                if lvl > best_level or (lvl == best_level
                                        and var.ev_time[i] > best_time):
                    best_var = var
                    best_level = lvl
                    best_time = var.ev_time[i]
        assert best_var is not None
        var = best_var
        reason = var.ev_reason[var.lc_idx]
        assert reason is not None
        for lit in (<Clause>reason).literals:
            if lit.var is var:
                inter = var.conflict_states & lit.states
                var.conflict_states = inter
                if not inter:
                    # the variable leaves the clause entirely
                    var.last_conflict_state = -1
                    var.lc_idx = -1
                    state.num_asserting -= 1
                else:
                    i = _latest_idx(var, inter)
                    evinter = var.ev_states[i] & inter
                    var.last_conflict_state = _lsb(evinter)
                    var.lc_idx = i
                    if var.ev_level[i] != level:
                        state.num_asserting -= 1
            else:
                _analyze_literal(lit, state)
    # materialize the clause and locate the asserting literal; scratch is
    # cleared per variable as it is emitted so that a variable that left the
    # clause and rejoined (hence sits in touched twice) is emitted once
    literals = []
    asserting = None
    assertion_level = 0
    last_at_level = None
    last_time = -1
    for var in touched:
        if not var.conflict_states:
            var.last_conflict_state = -1
            var.lc_idx = -1
            continue
        lit = var.literal(var.conflict_states)
        literals.append(lit)
        i = var.lc_idx
        lvl = var.ev_level[i]
        if lvl == level:
            asserting = lit
        elif lvl > assertion_level or (lvl == assertion_level
                                       and var.ev_time[i] > last_time):
            assertion_level = lvl
            last_time = var.ev_time[i]
            last_at_level = lit
        var.conflict_states = 0
        var.last_conflict_state = -1
        var.lc_idx = -1
    assert asserting is not None
    del touched[:]
    state.num_asserting = 0
    return LearnResult(literals, asserting, assertion_level, last_at_level)


def compute_lbd(SolverState state, result):
    """Distinct decision levels backing the clause, conflict level included."""
    cdef set levels = {state.level}
    cdef Literal lit
    cdef Literal asserting = <Literal>result.asserting
    cdef Variable var
    for lit in result.literals:
        if lit is asserting:
            continue
        var = lit.var
        levels.add(var.ev_level[_latest_idx(var, lit.states)])
    return len(levels)

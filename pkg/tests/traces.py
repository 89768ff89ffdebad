"""Configurations of three reference runs, written out by hand.

Each entry is ``(steps so far, state, storage, remaining input)`` with the
storage in ``TreeStack.render`` notation (pointer entry in angle brackets).
Some displayed lines group several steps, hence the explicit step counts.
"""

ANBN_RUN = [0, 1, 2, 3, 4, 5, 6, 7, 8]
ANBN_TRACE = [
    (0, "1", "{<(ε,@)>}", "abcd"),
    (1, "1", "{(ε,@), <(1,*)>}", "bcd"),
    (2, "2", "{(ε,@), (1,*), <(11,#)>}", "bcd"),
    (3, "2", "{(ε,@), <(1,*)>, (11,#)}", "bcd"),
    (4, "2", "{<(ε,@)>, (1,*), (11,#)}", "cd"),
    (5, "3", "{(ε,@), <(1,*)>, (11,#)}", "cd"),
    (6, "3", "{(ε,@), (1,*), <(11,#)>}", "d"),
    (7, "4", "{(ε,@), <(1,*)>, (11,#)}", "d"),
    (8, "4", "{<(ε,@)>, (1,*), (11,#)}", ""),
    (9, "5", "{<(ε,@)>, (1,*), (11,#)}", ""),
]

# tau'_1 tau'_2 tau'_3 (tau'_4)^3 tau'_5 tau'_7 (tau'_8)^2 tau'_9 (tau'_10)^2
# tau'_11 (tau'_12)^2 tau'_13 tau'_14 tau'_15, as 0-based indices
BRANCHING_RUN = [0, 1, 2, 3, 3, 3, 4, 6, 7, 7, 8, 9, 9, 10, 11, 11, 12, 13, 14]
_T = "(ε,@), (1,*), (11,*), (111,#)"
BRANCHING_TRACE = [
    (0, "1", "{<(ε,@)>}", "aabccd"),
    (1, "2", "{(ε,@), <(1,*)>}", "abccd"),
    (2, "2", "{(ε,@), (1,*), <(11,*)>}", "bccd"),
    (3, "3", "{(ε,@), (1,*), (11,*), <(111,#)>}", "bccd"),
    (6, "3", "{<(ε,@)>, (1,*), (11,*), (111,#)}", "bccd"),
    (7, "4", "{" + _T + ", <(2,*)>}", "ccd"),
    (8, "5", "{" + _T + ", (2,*), <(21,#)>}", "ccd"),
    (10, "5", "{<(ε,@)>, (1,*), (11,*), (111,#), (2,*), (21,#)}", "ccd"),
    (11, "6", "{(ε,@), <(1,*)>, (11,*), (111,#), (2,*), (21,#)}", "ccd"),
    (13, "6", "{(ε,@), (1,*), (11,*), <(111,#)>, (2,*), (21,#)}", "d"),
    (14, "7", "{(ε,@), (1,*), <(11,*)>, (111,#), (2,*), (21,#)}", "d"),
    (16, "7", "{<(ε,@)>, (1,*), (11,*), (111,#), (2,*), (21,#)}", "d"),
    (17, "8", "{" + _T + ", <(2,*)>, (21,#)}", "d"),
    (18, "8", "{" + _T + ", (2,*), <(21,#)>}", ""),
    (19, "9", "{" + _T + ", (2,*), <(21,#)>}", ""),
]
BRANCHING_FINAL_POINTER = (2, 1)

COMPILED_RUN = [
    "init(r1)",
    "call(r1,1,1,r3)",
    "suspend1(r3,1,⟨r1,1,1⟩)", "suspend2(⟨r1,1,1⟩)",
    "call(r1,1,2,r4)", "read(r4,1,1)",
    "call(r4,1,2,r5)",
    "suspend1(r5,1,⟨r4,1,2⟩)", "suspend2(⟨r4,1,2⟩)",
    "suspend1(r4,1,⟨r1,1,2⟩)", "suspend2(⟨r1,1,2⟩)",
    "resume1(r1,1,3)", "resume2(r1,1,3,r3)",
    "suspend1(r3,2,⟨r1,1,3⟩)", "suspend2(⟨r1,1,3⟩)",
    "resume1(r1,1,4)", "resume2(r1,1,4,r4)", "read(r4,2,1)",
    "resume1(r4,2,2)", "resume2(r4,2,2,r5)",
    "suspend1(r5,2,⟨r4,2,2⟩)", "suspend2(⟨r4,2,2⟩)",
    "suspend1(r4,2,⟨r1,1,4⟩)", "suspend2(⟨r1,1,4⟩)",
    "suspend1(r1,1,□)", "suspend2(□)",
]
_D = "(11,r3), (12,r4), (121,r5)"
# the hand trace ends in the box state itself; the compiled
# automaton accepts in a separate copy of it
COMPILED_TRACE = [
    (0, "□", "{<(ε,@)>}"),
    (1, "⟨r1,1,0⟩", "{(ε,@), <(1,□)>}"),
    (2, "⟨r3,1,0⟩", "{(ε,@), (1,□), <(11,⟨r1,1,1⟩)>}"),
    (4, "⟨r1,1,1⟩", "{(ε,@), <(1,□)>, (11,r3)}"),
    (6, "⟨r4,1,1⟩", "{(ε,@), (1,□), (11,r3), <(12,⟨r1,1,2⟩)>}"),
    (7, "⟨r5,1,0⟩", "{(ε,@), (1,□), (11,r3), (12,⟨r1,1,2⟩), <(121,⟨r4,1,2⟩)>}"),
    (9, "⟨r4,1,2⟩", "{(ε,@), (1,□), (11,r3), <(12,⟨r1,1,2⟩)>, (121,r5)}"),
    (11, "⟨r1,1,2⟩", "{(ε,@), <(1,□)>, " + _D + "}"),
    (13, "⟨r3,2,0⟩", "{(ε,@), (1,□), <(11,⟨r1,1,3⟩)>, (12,r4), (121,r5)}"),
    (15, "⟨r1,1,3⟩", "{(ε,@), <(1,□)>, " + _D + "}"),
    (18, "⟨r4,2,1⟩", "{(ε,@), (1,□), (11,r3), <(12,⟨r1,1,4⟩)>, (121,r5)}"),
    (20, "⟨r5,2,0⟩", "{(ε,@), (1,□), (11,r3), (12,⟨r1,1,4⟩), <(121,⟨r4,2,2⟩)>}"),
    (22, "⟨r4,2,2⟩", "{(ε,@), (1,□), (11,r3), <(12,⟨r1,1,4⟩)>, (121,r5)}"),
    (24, "⟨r1,1,4⟩", "{(ε,@), <(1,□)>, " + _D + "}"),
    (26, "□✓", "{<(ε,@)>, (1,r1), " + _D + "}"),
]


def mismatches(configs, expected, with_input=True):
    """Describe every displayed configuration the replayed trace disagrees with."""
    out = []
    for row in expected:
        n, state, storage = row[:3]
        c = configs[n]
        got = (str(c.state), c.storage.render()) + (("".join(c.remaining),) if with_input else ())
        want = (state, storage) + ((row[3],) if with_input else ())
        if got != want:
            out.append(f"after {n} steps: got {got}, expected {want}")
    return out

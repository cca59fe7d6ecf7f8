"""Hand-built access maps used by tests, demos and the ``fixtures`` command.

RB and device numbers in the comments are 1-based to match the usual
figure labelling; the maps themselves are 0-based.
"""
from __future__ import annotations

from .framegen import AccessMap, access_map_from_rbs

FIXTURES = ("fig1b", "fig3")


def fig1b_map() -> AccessMap:
    """R=10, N=5, K=3 with exactly RBs 3, 4 and 6 exclusive.

    RB1 {n1,n2}  RB2 {n2,n3}  RB3 {n1}  RB4 {n2}  RB5 {n4,n5}
    RB6 {n3}     RB7 {n4,n5}  RB8 {n1,n3}  RB9 {n4,n5}  RB10 {}
    """
    placements = [
        (0, 2, 7),  # n1
        (0, 1, 3),  # n2
        (1, 5, 7),  # n3
        (4, 6, 8),  # n4
        (4, 6, 8),  # n5
    ]
    return access_map_from_rbs(10, placements, [1, 2, 4, 1, 1])


def fig3_map() -> AccessMap:
    """R=10, N=5, K=3, every device at 1 W.

    n1 is alone on RB1 and n2 alone on RB10; n1, n2 and n3 share RB2, so n3
    only comes clean once both n1 and n2 are cancelled (three iterations).
    n4 and n5 are exclusive on RB3 and RB4; n3's other RBs (5 and 6) each
    carry two more devices, so no single cancellation frees it.

    RB1 {n1}  RB2 {n1,n2,n3}  RB3 {n4}  RB4 {n5}  RB5 {n1,n3,n4}
    RB6 {n3,n4,n5}  RB7 {}  RB8 {n2,n5}  RB9 {}  RB10 {n2}
    """
    placements = [
        (0, 1, 4),  # n1
        (1, 7, 9),  # n2
        (1, 4, 5),  # n3
        (2, 4, 5),  # n4
        (3, 5, 7),  # n5
    ]
    return access_map_from_rbs(10, placements, [1, 1, 1, 1, 1])


def get_fixture(name: str) -> AccessMap:
    if name == "fig1b":
        return fig1b_map()
    if name == "fig3":
        return fig3_map()
    raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")

import random

import pytest

from rtmcts.engine import init_state, load_level, load_spec

TOY_SPEC = """\
game toy
classes:
  avatar  A  avatar  inert
  wall    w  wall    inert
  gem     g  resource inert
  trap    t  static  inert
  exit    e  portal  inert
rules:
  avatar gem   score(1) kill-other
  avatar trap  lose
  avatar exit  win
"""

# NPC-free, but stepping on the pad teleports the avatar to a random exit pad
TELEPORT_SPEC = """\
game teleport
classes:
  avatar  A  avatar  inert
  wall    w  wall    inert
  pad     p  static  inert
  out     o  static  inert
rules:
  avatar pad  teleport(out)
"""

TELEPORT_LEVEL = """\
wwwwwww
wo...ow
w..p..w
w.pAp.w
w..p..w
wo...ow
wwwwwww
"""


def make_state(spec_text, level_text, seed=0):
    spec = load_spec(spec_text)
    return init_state(spec, load_level(level_text, spec), seed)


@pytest.fixture
def toy():
    def build(level_text, seed=0):
        return make_state(TOY_SPEC, level_text, seed)
    return build


@pytest.fixture
def rng():
    return random.Random(1234)

"""Board generation: determinism, symmetry, reserved pockets, connectivity."""

import pytest

from pommer.boardgen import (
    GenerationError,
    corner_cells,
    generate,
    is_accessible,
    reserved_cells,
    rotate90,
)
from pommer.engine import AGENT_BASE, PASSAGE, RIGID, GameConfig, Mode, state_digest


def gen(seed, **kwargs):
    return generate(GameConfig(rng_seed=seed, **kwargs))


class TestGenerate:
    def test_seed_determinism(self):
        a, b = gen(42), gen(42)
        assert a == b
        assert state_digest(a) == state_digest(b)

    def test_different_seeds_differ(self):
        assert gen(1).grid != gen(2).grid

    def test_agents_in_corners(self):
        state = gen(5)
        assert [a.position for a in state.agents] == corner_cells(11)
        n = 11
        for i, (r, c) in enumerate(corner_cells(11)):
            assert state.grid[r * n + c] == AGENT_BASE + i

    def test_teammates_on_opposite_corners(self):
        state = gen(5, mode=Mode.TEAM)
        for a, b in ((0, 3), (1, 2)):
            ra, ca = state.agents[a].position
            rb, cb = state.agents[b].position
            assert abs(ra - rb) == 10 and abs(ca - cb) == 10

    def test_wall_counts(self):
        state = gen(9)
        assert len(state.rigid) == 36
        assert len(state.wood) == 36

    def test_reserved_pockets_are_passages(self):
        state = gen(11)
        n = 11
        for r, c in reserved_cells(11):
            assert (r, c) not in state.rigid and (r, c) not in state.wood

    def test_rotational_symmetry(self):
        state = gen(13)
        for layer in (state.rigid, state.wood):
            rotated = {rotate90(cell, 11) for cell in layer}
            assert rotated == layer

    def test_hidden_powerup_count_and_placement(self):
        state = gen(17)
        assert len(state.hidden_items) == 36 // 2
        assert set(state.hidden_items) <= state.wood
        assert set(state.hidden_items.values()) <= {6, 7, 8}

    def test_connectivity(self):
        state = gen(19)
        assert is_accessible(state.grid)

    def test_agent_initial_stats(self):
        cfg = GameConfig(rng_seed=3, initial_ammo=2, initial_blast=3)
        state = generate(cfg)
        for a in state.agents:
            assert a.ammo == 2 and a.max_ammo == 2
            assert a.blast_strength == 3
            assert a.alive and not a.can_kick

    def test_custom_board_size(self):
        state = gen(23, board_size=7, num_rigid=4, num_wood=8)
        assert len(state.grid) == 49
        assert [a.position for a in state.agents] == corner_cells(7)
        assert len(state.hidden_items) == 4

    def test_infeasible_layout_raises(self):
        # Enough rigid orbits to wall off the corners on nearly every draw.
        with pytest.raises(GenerationError):
            for seed in range(5):
                gen(seed, board_size=5, num_rigid=12, num_wood=0)


class TestIsAccessible:
    def test_empty_board(self):
        assert is_accessible([PASSAGE] * 121)

    def test_bisected_board(self):
        grid = [PASSAGE] * 121
        for c in range(11):
            grid[5 * 11 + c] = RIGID
        assert not is_accessible(grid)

    def test_wood_counts_as_traversable(self):
        grid = [PASSAGE] * 121
        for c in range(11):
            grid[5 * 11 + c] = 2  # wood
        assert is_accessible(grid)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            is_accessible([0] * 120)


class TestDistribution:
    def test_orbit_occupancy_rate(self):
        # Over many seeds each free orbit should carry wood at roughly the
        # uniform rate (9 wood orbits of 27 free = 1/3), within 10 points.
        from pommer.boardgen import _free_orbits

        orbits = _free_orbits(11)
        hits = {orbit[0]: 0 for orbit in orbits}
        trials = 1000
        for seed in range(trials):
            state = gen(seed)
            for orbit in orbits:
                if orbit[0] in state.wood:
                    hits[orbit[0]] += 1
        expected = (36 / 4) / len(orbits)
        for rep, count in hits.items():
            rate = count / trials
            assert abs(rate - expected) <= 0.10, f"orbit {rep}: rate {rate:.3f}"

/**
 * Policy interface and the reference random agent.
 *
 * A policy maps one observation to one action per step. The optional
 * reset hook receives the per-episode info the runner sends via /init;
 * honoring its rng_seed makes recorded matches reproducible.
 */

import { SplitMix64 } from "./rng.js";
import type { AgentAction, Observation } from "./wire.js";

export interface EpisodeInfo {
  agent_id: number;
  mode: string;
  rng_seed: number;
  board_size: number;
  protocol_version: number;
}

export interface Policy {
  act(obs: Observation): AgentAction;
  reset?(info: EpisodeInfo): void;
}

/** Uniform over the six moves; uniform words when the mode has radio. */
export class RandomPolicy implements Policy {
  private rng: SplitMix64;

  constructor(seed: bigint | number = 0) {
    this.rng = new SplitMix64(seed);
  }

  reset(info: EpisodeInfo): void {
    this.rng = new SplitMix64(BigInt(info.rng_seed));
  }

  act(obs: Observation): AgentAction {
    const out: AgentAction = { action: this.rng.randrange(6) };
    if (obs.message !== undefined) {
      out.message = [this.rng.randint(1, 8), this.rng.randint(1, 8)];
    }
    return out;
  }
}

/**
 * SplitMix64, matching the randomness discipline in docs/wire-protocol.md
 * so seeded agents reproduce across implementations.
 */

const MASK64 = (1n << 64n) - 1n;
const GAMMA = 0x9e3779b97f4a7c15n;

export function mix64(z: bigint): bigint {
  z &= MASK64;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return z ^ (z >> 31n);
}

export class SplitMix64 {
  private state: bigint;

  constructor(seed: bigint | number) {
    this.state = BigInt(seed) & MASK64;
  }

  nextU64(): bigint {
    this.state = (this.state + GAMMA) & MASK64;
    return mix64(this.state);
  }

  /** Uniform integer in [0, n); rejection sampling, no modulo bias. */
  randrange(n: number): number {
    if (n <= 0) throw new RangeError("randrange bound must be positive");
    const bound = BigInt(n);
    const threshold = MASK64 + 1n - ((MASK64 + 1n) % bound);
    for (;;) {
      const u = this.nextU64();
      if (u < threshold) {
        return Number(u % bound);
      }
    }
  }

  randint(lo: number, hi: number): number {
    return lo + this.randrange(hi - lo + 1);
  }
}

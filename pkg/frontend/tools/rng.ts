// Deterministic PRNG for corpus generation: string-labeled streams so every
// instance and session draws from its own reproducible sequence.

export type Rng = () => number;

/** FNV-1a, folding a label into a 32-bit seed. */
export function hashSeed(label: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < label.length; i++) {
    h ^= label.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

/** mulberry32: fast, tiny, good enough for test-data generation. */
export function mulberry32(seed: number): Rng {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function rngFor(label: string): Rng {
  return mulberry32(hashSeed(label));
}

/** Uniform integer in [lo, hi], both ends included. */
export function randInt(rng: Rng, lo: number, hi: number): number {
  return lo + Math.floor(rng() * (hi - lo + 1));
}

export function pick<T>(rng: Rng, items: readonly T[]): T {
  return items[randInt(rng, 0, items.length - 1)];
}

export function chance(rng: Rng, p: number): boolean {
  return rng() < p;
}

/** The first k elements of a Fisher-Yates shuffle, without mutating input. */
export function sample<T>(rng: Rng, items: readonly T[], k: number): T[] {
  const pool = [...items];
  const out: T[] = [];
  for (let i = 0; i < k && pool.length > 0; i++) {
    const j = randInt(rng, 0, pool.length - 1);
    out.push(pool[j]);
    pool.splice(j, 1);
  }
  return out;
}

export interface Scale {
  readonly domain: [number, number];
  readonly range: [number, number];
  map(x: number): number;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    domain,
    range,
    map: (x) => r0 + ((x - d0) / span) * (r1 - r0),
  };
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return {
    domain,
    range,
    map: (x) => r0 + ((Math.log10(x) - l0) / span) * (r1 - r0),
  };
}

/** Round ticks on a 1-2-5 ladder covering [lo, hi], endpoints included. */
export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(count - 1, 1);
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = power;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * power;
    if (step >= rawStep) break;
  }
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

/** Ticks with mantissa 1, 2, or 5 inside [lo, hi] for log axes. */
export function logTicks(lo: number, hi: number): number[] {
  if (!(lo > 0 && hi > lo)) return [lo];
  const ticks: number[] = [];
  const eStart = Math.floor(Math.log10(lo));
  const eStop = Math.ceil(Math.log10(hi));
  for (let e = eStart; e <= eStop; e++) {
    for (const m of [1, 2, 5]) {
      const t = m * Math.pow(10, e);
      if (t >= lo * (1 - 1e-12) && t <= hi * (1 + 1e-12)) ticks.push(t);
    }
  }
  // dense decades get thinned to powers of ten
  if (ticks.length > 8) {
    return ticks.filter((t) => {
      const mantissa = t / Math.pow(10, Math.floor(Math.log10(t)));
      return Math.abs(mantissa - 1) < 1e-9;
    });
  }
  return ticks;
}

/** Compact tick label: plain decimals near 1, exponent form far from it. */
export function fmtTick(value: number): string {
  if (value === 0) return '0';
  const abs = Math.abs(value);
  if (abs >= 10000 || abs < 0.001) {
    return value.toExponential(0).replace('e+', 'e');
  }
  const text = abs >= 100 ? value.toFixed(0)
    : abs >= 1 ? value.toFixed(2)
    : value.toFixed(3);
  return text.replace(/\.?0+$/, '');
}

/** Least-squares slope of log(y) against log(x). */
export function logLogSlope(xs: number[], ys: number[]): number {
  if (xs.length !== ys.length || xs.length < 2) {
    throw new Error('slope needs at least two matching points');
  }
  const lx = xs.map((x) => Math.log(x));
  const ly = ys.map((y) => Math.log(Math.max(y, 1e-12)));
  const mx = lx.reduce((a, b) => a + b, 0) / lx.length;
  const my = ly.reduce((a, b) => a + b, 0) / ly.length;
  let cov = 0;
  let varX = 0;
  for (let i = 0; i < lx.length; i++) {
    cov += (lx[i] - mx) * (ly[i] - my);
    varX += (lx[i] - mx) * (lx[i] - mx);
  }
  return cov / varX;
}

/**
 * Exact rationals as they travel on the wire ("num/den" strings).
 * Arithmetic here is only for screen placement; equality checks stay on
 * the normalized pair so no precision is lost in comparisons.
 */

export interface Rational {
  num: number;
  den: number;
}

export function parseRational(text: string): Rational {
  const slash = text.indexOf("/");
  if (slash < 0) {
    const whole = Number(text);
    if (!Number.isInteger(whole)) {
      throw new Error(`not a rational: ${text}`);
    }
    return normalize({ num: whole, den: 1 });
  }
  const num = Number(text.slice(0, slash));
  const den = Number(text.slice(slash + 1));
  if (!Number.isInteger(num) || !Number.isInteger(den) || den === 0) {
    throw new Error(`not a rational: ${text}`);
  }
  return normalize({ num, den });
}

export function ratValue(r: Rational): number {
  return r.num / r.den;
}

export function ratAdd(a: Rational, b: Rational): Rational {
  return normalize({ num: a.num * b.den + b.num * a.den, den: a.den * b.den });
}

export function ratCompare(a: Rational, b: Rational): number {
  const left = a.num * b.den;
  const right = b.num * a.den;
  return left === right ? 0 : left < right ? -1 : 1;
}

export function ratEquals(a: Rational, b: Rational): boolean {
  return ratCompare(a, b) === 0;
}

export function formatRational(r: Rational): string {
  return r.den === 1 ? String(r.num) : `${r.num}/${r.den}`;
}

function normalize(r: Rational): Rational {
  const sign = r.den < 0 ? -1 : 1;
  const g = gcd(Math.abs(r.num), Math.abs(r.den)) || 1;
  return { num: (sign * r.num) / g, den: (sign * r.den) / g };
}

function gcd(a: number, b: number): number {
  while (b !== 0) {
    [a, b] = [b, a % b];
  }
  return a;
}

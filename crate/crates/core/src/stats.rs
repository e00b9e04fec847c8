//! Normal-distribution primitives and binomial confidence intervals.
//!
//! `normal_cdf` follows Cody's rational Chebyshev approximation for erfc
//! (absolute error well below 1e-14 over the whole real line), and
//! `normal_quantile` is Wichura's PPND16 algorithm. Both are plain
//! functions of their inputs so they can sit in hot sampling loops.

// coefficient tables keep the published digits verbatim
#![allow(clippy::excessive_precision)]

use std::f64::consts::FRAC_1_SQRT_2;

/// z-score of the two-sided 95% interval, Phi^-1(0.975).
pub const Z_95: f64 = 1.959_963_984_540_054;

const ERF_THRESH: f64 = 0.46875;
const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

// Cody region 1: erf(x), |x| <= 0.46875.
const CODY_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_56e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_47e3,
    1.857_777_061_846_031_53e-1,
];
const CODY_B: [f64; 4] = [
    2.360_129_095_234_412_09e1,
    2.440_246_379_344_441_73e2,
    1.282_616_526_077_372_28e3,
    2.844_236_833_439_170_6e3,
];

// Cody region 2: erfc(x), 0.46875 < x <= 4.
const CODY_C: [f64; 9] = [
    5.641_884_969_886_700_9e-1,
    8.883_149_794_388_375_94e0,
    6.611_919_063_714_162_95e1,
    2.986_351_381_974_001_3e2,
    8.819_522_212_417_690_9e2,
    1.712_047_612_634_070_58e3,
    2.051_078_377_826_071_47e3,
    1.230_339_354_797_997_25e3,
    2.153_115_354_744_038_46e-8,
];
const CODY_D: [f64; 8] = [
    1.574_492_611_070_983_47e1,
    1.176_939_508_913_124_99e2,
    5.371_811_018_620_098_6e2,
    1.621_389_574_566_690_19e3,
    3.290_799_235_733_459_63e3,
    4.362_619_090_143_247_16e3,
    3.439_367_674_143_721_64e3,
    1.230_339_354_803_749_42e3,
];

// Cody region 3: erfc(x), x > 4.
const CODY_P: [f64; 6] = [
    3.053_266_349_612_323_44e-1,
    3.603_448_999_498_044_39e-1,
    1.257_817_261_112_292_46e-1,
    1.608_378_514_874_227_66e-2,
    6.587_491_615_298_378_03e-4,
    1.631_538_713_730_209_78e-2,
];
const CODY_Q: [f64; 5] = [
    2.568_520_192_289_822_4e0,
    1.872_952_849_923_460_47e0,
    5.279_051_029_514_284_1e-1,
    6.051_834_131_244_131_9e-2,
    2.335_204_976_268_691_85e-3,
];

/// erfc(x) for x >= 0 by Cody's three-region scheme.
fn erfc_nonneg(x: f64) -> f64 {
    if x <= ERF_THRESH {
        let z = x * x;
        let mut num = CODY_A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + CODY_A[i]) * z;
            den = (den + CODY_B[i]) * z;
        }
        return 1.0 - x * (num + CODY_A[3]) / (den + CODY_B[3]);
    }
    if x <= 4.0 {
        let mut num = CODY_C[8] * x;
        let mut den = x;
        for i in 0..7 {
            num = (num + CODY_C[i]) * x;
            den = (den + CODY_D[i]) * x;
        }
        let r = (num + CODY_C[7]) / (den + CODY_D[7]);
        // split exp(-x^2) to keep the argument rounding error small
        let xq = (x * 16.0).floor() / 16.0;
        let del = (x - xq) * (x + xq);
        return (-xq * xq).exp() * (-del).exp() * r;
    }
    if x >= 26.6 {
        // erfc underflows to 0 well before here; 26.6^2 > 707
        return 0.0;
    }
    let z = 1.0 / (x * x);
    let mut num = CODY_P[5] * z;
    let mut den = z;
    for i in 0..4 {
        num = (num + CODY_P[i]) * z;
        den = (den + CODY_Q[i]) * z;
    }
    let mut r = z * (num + CODY_P[4]) / (den + CODY_Q[4]);
    r = (INV_SQRT_PI - r) / x;
    let xq = (x * 16.0).floor() / 16.0;
    let del = (x - xq) * (x + xq);
    (-xq * xq).exp() * (-del).exp() * r
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc_nonneg(-x)
    } else {
        erfc_nonneg(x)
    }
}

/// Standard normal CDF, Phi(x) = erfc(-x / sqrt(2)) / 2.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// P(|Z| <= x) = 2 Phi(x) - 1, computed through the upper tail so it
/// stays accurate for small x.
pub fn central_normal_prob(x: f64) -> f64 {
    1.0 - erfc(x * FRAC_1_SQRT_2)
}

/// P(Z > x) = 1 - Phi(x), computed directly from erfc so deep tails do not
/// underflow against 1.
pub fn normal_upper_tail(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

// Wichura PPND16 coefficients.
const PPND_A: [f64; 8] = [
    3.387_132_872_796_366_608e0,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const PPND_B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
const PPND_C: [f64; 8] = [
    1.423_437_110_749_683_577_34e0,
    4.630_337_846_156_545_295_9e0,
    5.769_497_221_460_691_405_5e0,
    3.647_848_324_763_204_605_04e0,
    1.270_458_252_452_368_382_58e0,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
const PPND_D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87e0,
    1.676_384_830_183_803_849_4e0,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const PPND_E: [f64; 8] = [
    6.657_904_643_501_103_777_2e0,
    5.463_784_911_164_114_369_9e0,
    1.784_826_539_917_291_335_8e0,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const PPND_F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

#[inline]
fn poly(coef: &[f64; 8], r: f64) -> f64 {
    let mut acc = coef[7];
    for i in (0..7).rev() {
        acc = acc * r + coef[i];
    }
    acc
}

/// Standard normal quantile Phi^-1(p) for p in (0, 1), Wichura's AS 241.
///
/// Relative error is below 1e-15 across the full open interval; p = 0 and
/// p = 1 map to -inf/+inf.
pub fn normal_quantile(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&PPND_A, r) / poly(&PPND_B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    if tail <= 0.0 {
        return if q < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    let mut r = (-tail.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        poly(&PPND_C, r) / poly(&PPND_D, r)
    } else {
        r -= 5.0;
        poly(&PPND_E, r) / poly(&PPND_F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Two-sided Wilson score interval for a binomial proportion.
///
/// Returns `(lo, hi)`; `z` is the normal critical value (1.96 for 95%).
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    assert!(n > 0, "wilson_interval: n must be positive");
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * nf)) / (1.0 + z2 / nf);
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / (1.0 + z2 / nf);
    ((center - half).max(0.0), (center + half).min(1.0))
}

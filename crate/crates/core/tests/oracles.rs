//! Independent slow implementations checked against the fast ones.

use logic_mining::ca::{evolve, random_config, rule_from_function, SpaceTime};
use logic_mining::complexity::{lz76, normalized_lz76, render_png};
use logic_mining::minimize::{minimize, prime_implicants, PrimeImplicants};
use logic_mining::sop::ProductTerm;
use logic_mining::TruthTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Kaspar & Schuster's quadratic LZ76 phrase count.
fn lz76_ks(s: &[bool]) -> usize {
    let n = s.len();
    if n == 1 {
        return 1;
    }
    let (mut c, mut l, mut i, mut k, mut kmax) = (1, 1, 0, 1, 1);
    loop {
        if s[i + k - 1] == s[l + k - 1] {
            k += 1;
            if l + k > n {
                c += 1;
                break;
            }
        } else {
            kmax = kmax.max(k);
            i += 1;
            if i == l {
                c += 1;
                l += kmax;
                if l + 1 > n {
                    break;
                }
                i = 0;
                k = 1;
                kmax = 1;
            } else {
                k = 1;
            }
        }
    }
    c
}

#[test]
fn lz76_matches_kaspar_schuster() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..3000 {
        let n = rng.gen_range(1..400);
        // mix of biased and periodic sequences, not only fair coins
        let p: f64 = rng.gen_range(0.02..0.98);
        let period = rng.gen_range(1..9);
        let s: Vec<bool> = if case % 3 == 0 {
            let base: Vec<bool> = (0..period).map(|_| rng.gen()).collect();
            (0..n).map(|i| base[i % period] ^ rng.gen_bool(0.02)).collect()
        } else {
            (0..n).map(|_| rng.gen_bool(p)).collect()
        };
        assert_eq!(lz76(&s).unwrap(), lz76_ks(&s), "case {case}: {s:?}");
    }
}

#[test]
fn lz76_known_values() {
    let bits = |t: &str| t.bytes().map(|b| b == b'1').collect::<Vec<_>>();
    // 0 | 001 | 10 | 100 | 1000 | 101
    assert_eq!(lz76(&bits("0001101001000101")).unwrap(), 6);
    for n in 2..300 {
        assert_eq!(lz76(&vec![false; n]).unwrap(), 2);
        assert_eq!(lz76(&vec![true; n]).unwrap(), 2);
    }
    assert_eq!(lz76(&[true]).unwrap(), 1);
    assert!(lz76(&[]).is_err());
}

#[test]
fn random_bits_normalize_near_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s: Vec<bool> = (0..200_000).map(|_| rng.gen()).collect();
    let v = normalized_lz76(lz76(&s).unwrap(), s.len());
    assert!((0.85..1.15).contains(&v), "{v}");
}

/// All 80 cubes (mask, value) with a non-empty mask.
fn cubes() -> Vec<(u8, u8)> {
    let mut out = Vec::new();
    for mask in 1u8..16 {
        for value in 0u8..16 {
            if value & !mask == 0 {
                out.push((mask, value));
            }
        }
    }
    out
}

fn cube_bits(mask: u8, value: u8) -> u16 {
    (0u8..16).filter(|k| k & mask == value).fold(0, |acc, k| acc | 1 << k)
}

fn brute_primes(id: u16, all: &[(u8, u8, u16)]) -> Vec<(u8, u8, u16)> {
    let implicant = |bits: u16| bits & !id == 0;
    all.iter()
        .copied()
        .filter(|&(mask, value, bits)| {
            implicant(bits)
                && (0..4).all(|b| {
                    let bit = 1u8 << b;
                    mask & bit == 0 || mask == bit || !implicant(cube_bits(mask & !bit, value & !bit))
                })
        })
        .collect()
}

#[test]
fn prime_implicants_match_brute_force() {
    let all: Vec<(u8, u8, u16)> = cubes().into_iter().map(|(m, v)| (m, v, cube_bits(m, v))).collect();
    for id in 1..u16::MAX {
        let expected: std::collections::BTreeSet<ProductTerm> =
            brute_primes(id, &all).into_iter().map(|(m, v, _)| ProductTerm::from_cube(m, v).unwrap()).collect();
        match prime_implicants(TruthTable::from_id(id)).unwrap() {
            PrimeImplicants::Terms(t) => assert_eq!(t, expected, "id {id}"),
            PrimeImplicants::Tautology => panic!("id {id}"),
        }
    }
    assert_eq!(prime_implicants(TruthTable::TRUE).unwrap(), PrimeImplicants::Tautology);
    assert!(prime_implicants(TruthTable::FALSE).is_err());
}

/// Minimum (terms, literals) over covers of at most three primes, if any.
fn small_cover_cost(id: u16, primes: &[(u8, u8, u16)]) -> Option<(usize, u32)> {
    let lits = |m: u8| m.count_ones();
    let mut best: Option<(usize, u32)> = None;
    let mut consider = |c: (usize, u32)| {
        if !matches!(best, Some(b) if b <= c) {
            best = Some(c)
        }
    };
    for (i, a) in primes.iter().enumerate() {
        if a.2 == id {
            consider((1, lits(a.0)));
        }
        for (j, b) in primes.iter().enumerate().skip(i + 1) {
            if a.2 | b.2 == id {
                consider((2, lits(a.0) + lits(b.0)));
            }
            for c in &primes[j + 1..] {
                if a.2 | b.2 | c.2 == id {
                    consider((3, lits(a.0) + lits(b.0) + lits(c.0)));
                }
            }
        }
    }
    best
}

#[test]
fn minimal_covers_up_to_three_terms() {
    // an optimal cover can always be built from primes
    let all: Vec<(u8, u8, u16)> = cubes().into_iter().map(|(m, v)| (m, v, cube_bits(m, v))).collect();
    let mut checked = 0;
    for id in 1..u16::MAX {
        let primes = brute_primes(id, &all);
        let got = minimize(TruthTable::from_id(id));
        let got_cost = (got.term_count(), got.literal_count());
        match small_cover_cost(id, &primes) {
            Some(cost) => {
                assert_eq!(got_cost, cost, "id {id}: {got}");
                checked += 1;
            }
            None => assert!(got.term_count() > 3, "id {id}: {got}"),
        }
    }
    assert!(checked > 1000, "{checked}");
}

#[test]
fn png_golden_blank_row() {
    let st = SpaceTime::from_rows(vec![logic_mining::ca::Config::from_bits(&[false; 5]).unwrap()]);
    let png = render_png(&st);
    let expected_head: [u8; 33] = [
        0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A, // signature
        0, 0, 0, 13, b'I', b'H', b'D', b'R', 0, 0, 0, 5, 0, 0, 0, 1, 8, 0, 0, 0, 0, // 5x1, 8-bit gray
        0x33, 0x95, 0x3B, 0x2F, // CRC of IHDR
    ];
    assert_eq!(&png[..33], &expected_head);
    assert_eq!(&png[png.len() - 12..], &[0, 0, 0, 0, b'I', b'E', b'N', b'D', 0xAE, 0x42, 0x60, 0x82]);
    // IDAT: filter byte 0, then five white (state 0) pixels
    let idat_len = u32::from_be_bytes(png[33..37].try_into().unwrap()) as usize;
    assert_eq!(&png[37..41], b"IDAT");
    let data = &png[41..41 + idat_len];
    let mut raw = Vec::new();
    std::io::Read::read_to_end(&mut flate2::read::ZlibDecoder::new(data), &mut raw).unwrap();
    assert_eq!(raw, [0, 255, 255, 255, 255, 255]);
    assert_eq!(png.len(), 33 + 12 + idat_len + 12);
}

#[test]
fn png_size_separates_noise_from_order() {
    let noisy = evolve(&random_config(200, 0.5, 3).unwrap(), rule_from_function(TruthTable::from_id(32746)), 199);
    let flat = SpaceTime::from_rows(vec![logic_mining::ca::Config::zeros(200).unwrap(); 200]);
    let (a, b) = (render_png(&noisy).len(), render_png(&flat).len());
    assert!(a >= 20 * b, "{a} vs {b}");
    // a repeated row costs almost nothing extra
    let mut rows = noisy.rows().to_vec();
    rows.push(noisy.last().clone());
    let dup = render_png(&SpaceTime::from_rows(rows)).len();
    assert!(dup <= a + 64, "{dup} vs {a}");
}

#[test]
fn random_config_density() {
    for p in [0.1, 0.5, 0.9] {
        let mean = (0..1000).map(|s| random_config(500, p, s).unwrap().count_ones() as f64 / 500.0).sum::<f64>() / 1000.0;
        assert!((mean - p).abs() < 0.005, "p {p}: {mean}");
    }
    assert_eq!(random_config(64, 0.0, 1).unwrap().count_ones(), 0);
    assert_eq!(random_config(64, 1.0, 1).unwrap().count_ones(), 64);
}

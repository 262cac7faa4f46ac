//! `commel selftest`: library vs. brute-force oracle on the 23/11/4 group.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use commel::commutative::{decrypt_full, reencrypt_with, strip_a, strip_b, Order};
use commel::elgamal::{encrypt, encrypt_with, KeyPair};
use commel::oracle::{
    brute_force_dlog, chi_square_uniform, enumerate_subgroup, reference_pipeline,
    ReferenceInputs,
};
use commel::{GroupElement, GroupParams, Scalar};

fn report(name: &str, ok: bool, detail: String) -> bool {
    println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn toy() -> GroupParams {
    GroupParams::new(23u32.into(), 11u32.into(), 4u32.into(), 2)
}

fn sweep(params: &GroupParams, elements: &[BigUint]) -> (u64, u64) {
    let s = |v: u64| Scalar::from_u64(v, params).expect("v < Q");
    let mut cases = 0;
    let mut mismatches = 0;
    for m in elements {
        let m_elem = GroupElement::new(m.clone(), params).expect("enumerated element");
        for x_a in 0..11 {
            let a = KeyPair::from_secret(params.clone(), s(x_a));
            for x_b in 0..11 {
                let b = KeyPair::from_secret(params.clone(), s(x_b));
                for k_a in 0..11 {
                    let c = encrypt_with(a.public(), &m_elem, &s(k_a)).expect("valid");
                    for k_b in 0..11 {
                        cases += 1;
                        let c3 = reencrypt_with(b.public(), &c, &s(k_b)).expect("valid");
                        let reference = reference_pipeline(
                            &ReferenceInputs {
                                m: m.clone(),
                                x_a: x_a.into(),
                                x_b: x_b.into(),
                                k_a: k_a.into(),
                                k_b: k_b.into(),
                                r: 0u32.into(),
                            },
                            params,
                        );
                        let triple = (
                            c3.c1.value().clone(),
                            c3.c2.value().clone(),
                            c3.c3.value().clone(),
                        );
                        let sa = strip_a(&a, &c3).expect("valid");
                        let sb = strip_b(&b, &c3).expect("valid");
                        let ok = triple == reference.triple
                            && (sa.y1.value(), sa.y2.value())
                                == (&reference.a_stripped.0, &reference.a_stripped.1)
                            && (sb.y1.value(), sb.y2.value())
                                == (&reference.b_stripped.0, &reference.b_stripped.1)
                            && decrypt_full(&a, &b, &c3, Order::AFirst).ok().as_ref()
                                == Some(&m_elem)
                            && decrypt_full(&a, &b, &c3, Order::BFirst).ok().as_ref()
                                == Some(&m_elem)
                            && reference.a_first == *m
                            && reference.b_first == *m;
                        if !ok {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    (cases, mismatches)
}

pub fn run() -> bool {
    let params = toy();
    let mut all = true;

    let elements = match enumerate_subgroup(&params) {
        Ok(e) => e,
        Err(err) => return report("enumerate subgroup", false, err.to_string()),
    };
    all &= report(
        "enumerate subgroup",
        elements.len() == 11,
        format!("{} elements", elements.len()),
    );

    let dlog_ok = (0..11u64).all(|x| {
        let y = params.exp_g(&Scalar::from_u64(x, &params).expect("x < Q"));
        brute_force_dlog(y.value(), &params).ok() == Some(BigUint::from(x))
    });
    all &= report("discrete log round trip", dlog_ok, "11 exponents".into());

    let (cases, mismatches) = sweep(&params, &elements);
    all &= report(
        "two-layer sweep vs reference",
        mismatches == 0,
        format!("{cases} cases, {mismatches} mismatches"),
    );

    let mut rng = ChaCha20Rng::seed_from_u64(0x0c0ffee);
    let key = KeyPair::from_secret(params.clone(), Scalar::from_u64(3, &params).expect("3 < Q"));
    let m = GroupElement::new(2u32.into(), &params).expect("2 is a residue");
    let firsts: Vec<BigUint> = (0..11_000)
        .map(|_| {
            encrypt(key.public(), &m, &mut rng)
                .expect("valid")
                .y1
                .into_value()
        })
        .collect();
    match chi_square_uniform(&firsts, &params) {
        Ok(res) => {
            all &= report(
                "first-component uniformity",
                res.pass,
                format!(
                    "chi2 = {:.3} < {:.3} (df = {})",
                    res.statistic, res.critical, res.df
                ),
            )
        }
        Err(err) => all &= report("first-component uniformity", false, err.to_string()),
    }
    all
}

//! Golden vectors for cross-implementation checks.
//!
//! Three text files, one record per line:
//!
//! - `domain_separators.txt`: `<op> <app> <value> <hex bytes>`
//! - `sponge.txt`: `<field> <inputs, comma-separated or -> <hash>`, decimal
//! - `encodings.txt`: `<tag> <value> <hex encoding>`

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigUint;
use v2x_zk::commitment::sponge_hash;
use v2x_zk::field::{encode, DTypeTag, PrimeField, StandardField, TestField, Value};
use v2x_zk::protocol::{DomainSeparator, APP_AUDIT, APP_RSS};

use crate::files;
use crate::CliError;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn domain_separators() -> String {
    let mut s = String::new();
    for (app, id) in [("rss", APP_RSS), ("audit", APP_AUDIT)] {
        for (op, d) in [
            ("commit", DomainSeparator::commit(id)),
            ("sign", DomainSeparator::sign(id)),
        ] {
            let _ = writeln!(s, "{op} {app} {} {}", d.value(), hex(&d.to_bytes()));
        }
    }
    s
}

/// Input vectors, by value; `q - k` is written as a negative offset.
const SPONGE_INPUTS: [&[i64]; 11] = [
    &[],
    &[0],
    &[1],
    &[0, 0],
    &[1, 2],
    &[1, 2, 3],
    &[42, 0],
    &[65536, 25630, 1, 2, 3, 4, 5],
    &[
        1_099_511_627_783,
        205_891_132_094_649,
        95_367_431_640_625,
        4_747_561_509_943,
    ],
    &[-1],
    &[-1, -2, -3],
];

fn sponge_lines<F: PrimeField>(s: &mut String) {
    for inputs in SPONGE_INPUTS {
        let xs: Vec<F> = inputs.iter().map(|&v| F::from_i128(v as i128)).collect();
        let shown: Vec<String> = xs.iter().map(|x| x.to_biguint().to_string()).collect();
        let list = if shown.is_empty() {
            "-".to_string()
        } else {
            shown.join(",")
        };
        let _ = writeln!(s, "{} {list} {}", F::NAME, sponge_hash(&xs).to_biguint());
    }
}

pub fn sponge() -> String {
    let mut s = String::new();
    sponge_lines::<TestField>(&mut s);
    sponge_lines::<StandardField>(&mut s);
    s
}

pub fn encodings() -> String {
    let big = TestField::from_biguint(&(TestField::modulus() - BigUint::from(1u8)));
    let cases: Vec<(DTypeTag, Value<TestField>, String)> = vec![
        (DTypeTag::Ctx, Value::Integer(131_072), "131072".into()),
        (DTypeTag::Ts, Value::Integer(1_700_000_000), "1700000000".into()),
        (
            DTypeTag::Commit,
            Value::Field(TestField::from_u64(25_630)),
            "25630".into(),
        ),
        (DTypeTag::Commit, Value::Field(big), big.to_biguint().to_string()),
        (
            DTypeTag::Nonce,
            Value::Bytes((0u8..16).collect()),
            "000102030405060708090a0b0c0d0e0f".into(),
        ),
        (DTypeTag::Proof, Value::Bytes(vec![0xde, 0xad]), "dead".into()),
    ];
    let mut s = String::new();
    for (tag, v, shown) in cases {
        let bytes = encode(&v, tag).expect("valid sample");
        let _ = writeln!(s, "{tag} {shown} {}", hex(&bytes));
    }
    s
}

/// Writes the three files into `dir`.
pub fn cmd_vectors(dir: &Path) -> Result<Vec<String>, CliError> {
    let mut written = Vec::new();
    for (name, body) in [
        ("domain_separators.txt", domain_separators()),
        ("sponge.txt", sponge()),
        ("encodings.txt", encodings()),
    ] {
        let p = dir.join(name);
        files::write(&p, body)?;
        written.push(p.display().to_string());
    }
    Ok(written)
}

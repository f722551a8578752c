use std::io::Cursor;

use num_bigint::BigInt;
use rotsys::formats::{read_catalog, read_certificate, read_flags, read_q, write_catalog, write_certificate, write_flags, write_q, FormatError, QHeader};
use rotsys_core::catalog::catalog_up_to;
use rotsys_core::flag::enumerate_bases;
use rotsys_core::pair_density::pair_density_matrices;
use rotsys_core::{Certificate, Class, Factorization, Rational, TypeConfig};

fn bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut v = Vec::new();
    f(&mut v).unwrap();
    v
}

#[test]
fn catalogs_round_trip_byte_for_byte() {
    for (class, n) in [(Class::Realizable, 6), (Class::Convex, 7)] {
        let cat = catalog_up_to(class, n).unwrap();
        let text = bytes(|w| write_catalog(w, &cat));
        let back = read_catalog(Cursor::new(&text)).unwrap();
        assert_eq!(back, cat);
        assert_eq!(bytes(|w| write_catalog(w, &back)), text);
    }
}

#[test]
fn catalog_files_reject_damage() {
    let cat = catalog_up_to(Class::Realizable, 5).unwrap();
    let text = String::from_utf8(bytes(|w| write_catalog(w, &cat))).unwrap();
    let truncated: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
    assert!(read_catalog(Cursor::new(truncated)).is_err());
    let garbled = text.replacen("0:", "0;", 1);
    assert!(read_catalog(Cursor::new(garbled)).is_err());
    match read_catalog(Cursor::new("not a catalog\n")) {
        Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 1),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn flags_and_pair_densities_round_trip() {
    let config = TypeConfig::reduced();
    let bases = enumerate_bases(&config, Class::Realizable, |n| catalog_up_to(Class::Realizable, n)).unwrap();
    for (i, b) in bases.iter().enumerate() {
        let text = bytes(|w| write_flags(w, b, i));
        let (j, back) = read_flags(Cursor::new(&text)).unwrap();
        assert_eq!(j, i);
        assert_eq!(back.flags(), b.flags());
        assert_eq!(back.spec(), b.spec());
    }
    let e7 = catalog_up_to(Class::Realizable, 7).unwrap();
    let mut text = Vec::new();
    let mut expect = Vec::new();
    for target in [0, 17, 22_729] {
        let qs = pair_density_matrices(&bases, e7.get(target).unwrap()).unwrap();
        for (i, q) in qs.into_iter().enumerate() {
            let h = QHeader {
                class: Class::Realizable,
                n: 7,
                type_index: i,
                target,
            };
            write_q(&mut text, &h, &q).unwrap();
            expect.push((h, q));
        }
    }
    assert_eq!(read_q(Cursor::new(&text)).unwrap(), expect);
}

#[test]
fn certificates_round_trip_exactly() {
    let r = |n: i64, d: i64| Rational::new(BigInt::from(n), BigInt::from(d));
    let huge = Rational::new(BigInt::from(3).pow(80), BigInt::from(2).pow(100));
    let cert = Certificate {
        class: Class::Realizable,
        n: 7,
        config: TypeConfig::reduced(),
        factors: vec![
            Factorization::new(vec![vec![r(1, 2), r(-3, 4)], vec![r(0, 1), huge.clone()]], vec![r(5, 7), r(0, 1)]).unwrap(),
            Factorization::zero(3),
        ],
        bound: r(26, 35),
    };
    let text = bytes(|w| write_certificate(w, &cert));
    assert!(String::from_utf8_lossy(&text).starts_with("flagcert v1 class=realizable N=7 bound=26/35\n"));
    assert_eq!(read_certificate(Cursor::new(&text)).unwrap(), cert);

    let tampered = String::from_utf8(text).unwrap().replace("diag 5/7 0", "diag 5/7 -1");
    assert!(read_certificate(Cursor::new(tampered)).is_err());
}

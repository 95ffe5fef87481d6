//! Parsing and evaluating mapping expressions, including error reporting.
//!
//! cargo run --example expressions

use retract_iter::mapexpr::parse;

fn main() {
    let valid = [
        ("x >= 0 ? -2*sin(x/2) : 2*sin(x/2)", 1),
        ("abs(x)", 1),
        ("clamp(x0 + x1, -1, 1)", 2),
        ("-0.125 * exp(log(4)) / -x", 1),
        ("max(x0, min(x1, 0.5))", 2),
    ];
    for (src, dim) in valid {
        let e = parse(src, dim).expect("valid expression");
        let point: Vec<f64> = (0..dim).map(|i| 0.25 + i as f64).collect();
        println!("{src}");
        println!("  parsed  {e}");
        println!("  at {point:?} = {:?}", e.eval(&point));
        let again = parse(&e.to_string(), dim).expect("display re-parses");
        assert_eq!(again, e);
    }

    println!();
    for (src, dim) in [
        ("sin(x", 1),
        ("2 ^ 3", 1),
        ("foo(x)", 1),
        ("x2", 2),
        ("1.5e", 1),
        ("max(x)", 1),
    ] {
        match parse(src, dim) {
            Ok(e) => println!("{src:<10} unexpectedly parsed as {e}"),
            Err(err) => println!(
                "{src:<10} {} at byte {}: {}",
                err.kind, err.position, err.message
            ),
        }
    }

    println!();
    for (src, x) in [("1 / x", 0.0), ("log(x)", -1.0), ("sqrt(x)", -4.0)] {
        let e = parse(src, 1).unwrap();
        println!("{src:<8} at {x}: {:?}", e.eval(&[x]));
    }
}

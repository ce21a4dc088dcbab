//! Built-in integrand corpus: the experiment functions plus exactness
//! witnesses, each with its interval and analytic value where one exists.

pub struct CorpusEntry {
    pub name: &'static str,
    pub expression: &'static str,
    pub a: f64,
    pub b: f64,
    pub analytic: Option<f64>,
    /// Where the analytic value comes from.
    pub note: &'static str,
}

pub fn entries() -> Vec<CorpusEntry> {
    let sqrt5 = 5.0f64.sqrt();
    vec![
        CorpusEntry {
            name: "linear",
            expression: "x",
            a: 0.0,
            b: 2.0,
            analytic: Some(2.0),
            note: "x^2/2 at the endpoints",
        },
        CorpusEntry {
            name: "quadratic",
            expression: "x^2",
            a: 0.0,
            b: 2.0,
            analytic: Some(8.0 / 3.0),
            note: "x^3/3 at the endpoints",
        },
        CorpusEntry {
            name: "cubic",
            expression: "x^3",
            a: 0.0,
            b: 2.0,
            analytic: Some(4.0),
            note: "x^4/4 at the endpoints",
        },
        CorpusEntry {
            name: "sqrt1px2",
            expression: "sqrt(1+x^2)",
            a: 0.0,
            b: 2.0,
            analytic: Some(sqrt5 + 0.5 * (2.0 + sqrt5).ln()),
            note: "(x*sqrt(1+x^2) + asinh(x))/2 at the endpoints",
        },
        CorpusEntry {
            name: "pow2x",
            expression: "2^x",
            a: 0.0,
            b: 2.0,
            analytic: Some(3.0 / std::f64::consts::LN_2),
            note: "2^x/ln(2) at the endpoints: 3/ln 2",
        },
        CorpusEntry {
            name: "x6",
            expression: "x^6",
            a: 0.0,
            b: 6.0,
            analytic: Some(279_936.0 / 7.0),
            note: "x^7/7 at the endpoints: 6^7/7",
        },
        CorpusEntry {
            name: "elliptic_half",
            expression: "sqrt(1-0.5*sin(x)^2)",
            a: 0.0,
            b: std::f64::consts::FRAC_PI_2,
            analytic: Some(1.350_643_881_047_675_5),
            note: "complete elliptic integral of the second kind E(m=0.5)",
        },
    ]
}

pub fn find(name: &str) -> Option<CorpusEntry> {
    entries().into_iter().find(|e| e.name == name)
}

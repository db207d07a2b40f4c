//! Symmetric 7-point triangle rule, exact for polynomials of degree 5.

#[derive(Debug, Clone, Copy)]
pub struct QuadPoint {
    pub bary: [f64; 3],
    /// Weight relative to the triangle area; the weights sum to one.
    pub weight: f64,
}

const A1: f64 = 0.059_715_871_789_769_82; // (9 - 2 sqrt 15) / 21
const B1: f64 = 0.470_142_064_105_115_1; // (6 + sqrt 15) / 21
const W1: f64 = 0.132_394_152_788_506_2; // (155 + sqrt 15) / 1200
const A2: f64 = 0.797_426_985_353_087_3; // (9 + 2 sqrt 15) / 21
const B2: f64 = 0.101_286_507_323_456_3; // (6 - sqrt 15) / 21
const W2: f64 = 0.125_939_180_544_827_1; // (155 - sqrt 15) / 1200

pub const TRI7: [QuadPoint; 7] = [
    QuadPoint {
        bary: [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        weight: 0.225,
    },
    QuadPoint {
        bary: [A1, B1, B1],
        weight: W1,
    },
    QuadPoint {
        bary: [B1, A1, B1],
        weight: W1,
    },
    QuadPoint {
        bary: [B1, B1, A1],
        weight: W1,
    },
    QuadPoint {
        bary: [A2, B2, B2],
        weight: W2,
    },
    QuadPoint {
        bary: [B2, A2, B2],
        weight: W2,
    },
    QuadPoint {
        bary: [B2, B2, A2],
        weight: W2,
    },
];

#![allow(dead_code)]

use morgan_core::canonical::StateSpace;
use morgan_core::exactalg::{rat, RationalMatrix};

fn ones(r: usize, c: usize, pts: &[(usize, usize)]) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(r, c);
    for &(i, j) in pts {
        m[(i, j)] = rat(1);
    }
    m
}

/// Nine states, four inputs, three outputs; indices (1,1,3,4).
pub fn first_system() -> StateSpace {
    let a = ones(9, 9, &[(2, 3), (3, 4), (4, 5), (6, 2), (6, 7), (7, 8)]);
    let b = ones(9, 4, &[(0, 0), (1, 1), (5, 2), (8, 3)]);
    let c = ones(3, 9, &[(0, 0), (1, 1), (2, 0), (2, 2)]);
    StateSpace::new(a, b, c).unwrap()
}

pub fn first_p() -> RationalMatrix {
    RationalMatrix::from_i64(&[
        &[1, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 1, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, -1, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, -1, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, -1, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, -1],
        &[0, 0, -1, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, -1, 0, 1, 0, 0, 0],
        &[0, 0, 0, 0, -1, 0, 1, 0, 0],
    ])
}

pub fn first_g_i() -> RationalMatrix {
    RationalMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, -1], &[0, 0, -1, 0]])
}

/// Numeric basis for the tuple (1,4,4) with the first chain as feedback row.
pub fn first_q() -> RationalMatrix {
    RationalMatrix::from_i64(&[
        &[0, 1, 0, 0, 0, 1, 0, 0, 0],
        &[1, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 1, 1, 0, 0, 1, 1, 0, 0],
        &[0, 0, 1, 1, 0, 0, 1, 1, 0],
        &[0, 0, 0, 1, 1, 0, 0, 1, 1],
        &[0, 1, 0, 0, 0, 2, 0, 0, 0],
        &[0, 0, 1, 0, 0, 0, 2, 0, 0],
        &[0, 0, 0, 1, 0, 0, 0, 2, 0],
        &[0, 0, 0, 0, 1, 0, 0, 0, 2],
    ])
}

pub fn first_f_f() -> RationalMatrix {
    RationalMatrix::from_i64(&[
        &[-3, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 3, -2, -1, 1, 3, -2, -2, 1],
        &[0, 3, -2, 0, 0, 4, -3, 0, 0],
    ])
}

pub fn first_g_f() -> RationalMatrix {
    RationalMatrix::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[1, 0, -1]])
}

pub fn first_f() -> RationalMatrix {
    RationalMatrix::from_i64(&[
        &[-1, 0, 0, 0, 0, 0, -1, 0, 0],
        &[0, -3, 0, 0, 0, 0, 0, 0, 0],
        &[-3, 0, 1, -1, 0, 0, -1, 0, 0],
        &[-4, 0, -1, 1, -1, 0, -1, -1, 1],
    ])
}

pub fn first_g() -> RationalMatrix {
    RationalMatrix::from_i64(&[&[0, 0, 0], &[0, 1, 0], &[-1, 0, 1], &[-1, 0, 0]])
}

/// Nine states, five inputs, three outputs; already in controller form
/// with indices (1,2,2,2,2).
pub fn second_system() -> StateSpace {
    let a = RationalMatrix::from_i64(&[
        &[0, 0, 0, 0, 0, 1, 0, 0, 0],
        &[0, 0, 1, 0, 0, 0, 0, 0, 0],
        &[0, -1, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 1, 0, 0, 0, 0],
        &[0, 0, 1, 0, 0, 0, -1, 0, 0],
        &[0, 0, 0, 0, 0, 0, 1, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 0, 1],
        &[0, 0, 0, 0, 0, 0, 0, 0, -1],
    ]);
    let b = ones(9, 5, &[(0, 0), (2, 1), (4, 2), (6, 3), (8, 4)]);
    let c = RationalMatrix::from_i64(&[
        &[0, 1, 0, 0, 0, 0, 1, 1, 1],
        &[1, 0, 1, 1, 0, 0, 0, 0, 1],
        &[1, 0, 0, 0, 0, 0, 0, 0, 1],
    ]);
    StateSpace::new(a, b, c).unwrap()
}

/// Basis `[Q_A | Q_B]` for the tuple (2,2,3) with chains 1 and 3 as
/// feedback rows.
pub fn second_q() -> RationalMatrix {
    RationalMatrix::from_i64(&[
        &[0, 0, 1, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 1, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 1, 0, 0, 0],
        &[0, 0, 0, 0, 0, 0, 1, 0, 0],
        &[0, 0, 0, 0, 0, 0, 0, 1, 0],
        &[1, 0, 1, 0, 0, 0, 0, 0, 0],
        &[0, 0, 0, 1, 0, 0, 0, 0, 0],
        &[0, 1, 0, 0, 1, 0, 0, 1, 0],
        &[0, 0, 0, 0, 0, 1, 0, 0, 1],
    ])
}

pub fn second_f_f() -> RationalMatrix {
    RationalMatrix::from_i64(&[
        &[0, 0, -2, 0, 1, -5, -3, -1, -2],
        &[0, 0, 1, -9, -20, -11, 0, -10, -10],
        &[0, 0, -1, -1, 0, 0, 0, 0, 0],
    ])
}

pub fn second_g_f() -> RationalMatrix {
    RationalMatrix::from_i64(&[&[0, 1, -1], &[1, 0, -1], &[0, 0, 1]])
}

/// Final feedback with the free parameters `(t1, t2, t3, t4)`.
pub fn second_f(t: [i64; 4]) -> RationalMatrix {
    let [t1, t2, t3, t4] = t;
    RationalMatrix::from_i64(&[
        &[t1, t2, 0, 0, t2, -1 - t1, 1, -t2, 0],
        &[-2, 1, -3, -3, -1, 0, 0, 0, -2],
        &[t3, t4, -2, 0, t4, -t3, 1, -t4, 1],
        &[1, -20, -1, 0, -10, 0, -9, 0, -10],
        &[-1, 0, 0, 0, 0, 0, -1, 0, 0],
    ])
}

pub fn second_g() -> RationalMatrix {
    RationalMatrix::from_i64(&[&[0, 0, 0], &[0, 1, -1], &[0, 0, 0], &[1, 0, -1], &[0, 0, 1]])
}

/// Constant parts of the feedback rows `M(s) = s e_p + mu`.
pub fn second_mu(t: [i64; 4]) -> Vec<Vec<i64>> {
    let [t1, t2, t3, t4] = t;
    vec![
        vec![-t1, -t2, 0, 0, -t2, t1, -1, t2, 0],
        vec![-t3, -t4, 1, 0, -t4, t3, 0, t4, -1],
    ]
}

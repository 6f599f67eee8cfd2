//! Reference K = 3 solutions for the time budget table, rounded to three
//! decimals. Coefficients are 30 x 3 (rows in dataset order), bases 18 x 3
//! (activities by component).
#![allow(dead_code)]

/// Latent budget coefficients.
pub const LBA_COEF: [[f64; 3]; 30] = [
    [0.000, 0.172, 0.829],
    [0.057, 0.107, 0.836],
    [0.049, 0.064, 0.887],
    [0.000, 0.990, 0.011],
    [0.035, 0.886, 0.079],
    [0.081, 0.849, 0.070],
    [0.091, 0.892, 0.018],
    [0.068, 0.923, 0.008],
    [0.050, 0.958, 0.000],
    [0.156, 0.817, 0.027],
    [0.275, 0.656, 0.069],
    [0.345, 0.590, 0.065],
    [0.703, 0.150, 0.147],
    [0.704, 0.097, 0.199],
    [0.711, 0.106, 0.183],
    [0.243, 0.120, 0.637],
    [0.210, 0.061, 0.730],
    [0.191, 0.000, 0.810],
    [0.834, 0.172, 0.000],
    [0.819, 0.178, 0.003],
    [0.695, 0.296, 0.010],
    [0.926, 0.083, 0.000],
    [0.916, 0.102, 0.000],
    [0.891, 0.137, 0.000],
    [0.990, 0.025, 0.000],
    [0.980, 0.024, 0.000],
    [0.930, 0.072, 0.000],
    [0.959, 0.000, 0.045],
    [0.978, 0.004, 0.034],
    [0.945, 0.000, 0.056],
];

/// End-member coefficients.
pub const EMA_COEF: [[f64; 3]; 30] = [
    [0.000, 0.156, 0.844],
    [0.049, 0.095, 0.856],
    [0.038, 0.049, 0.913],
    [0.004, 0.975, 0.021],
    [0.035, 0.873, 0.091],
    [0.078, 0.838, 0.084],
    [0.093, 0.874, 0.033],
    [0.074, 0.903, 0.023],
    [0.049, 0.949, 0.002],
    [0.158, 0.795, 0.047],
    [0.265, 0.643, 0.092],
    [0.328, 0.581, 0.091],
    [0.658, 0.159, 0.183],
    [0.656, 0.109, 0.235],
    [0.669, 0.107, 0.224],
    [0.227, 0.114, 0.659],
    [0.194, 0.054, 0.751],
    [0.183, 0.000, 0.817],
    [0.798, 0.180, 0.022],
    [0.783, 0.184, 0.033],
    [0.666, 0.298, 0.036],
    [0.878, 0.096, 0.027],
    [0.869, 0.119, 0.013],
    [0.867, 0.133, 0.000],
    [0.928, 0.048, 0.024],
    [0.917, 0.043, 0.040],
    [0.881, 0.079, 0.040],
    [0.886, 0.023, 0.090],
    [0.916, 0.005, 0.079],
    [0.885, 0.013, 0.101],
];

/// Minimum-volume NMF coefficients.
pub const NMF_COEF: [[f64; 3]; 30] = [
    [0.000, 0.163, 0.837],
    [0.056, 0.101, 0.843],
    [0.048, 0.059, 0.892],
    [0.000, 0.954, 0.046],
    [0.035, 0.854, 0.111],
    [0.081, 0.819, 0.100],
    [0.090, 0.859, 0.051],
    [0.069, 0.889, 0.042],
    [0.049, 0.925, 0.025],
    [0.154, 0.787, 0.058],
    [0.272, 0.633, 0.094],
    [0.341, 0.571, 0.088],
    [0.695, 0.151, 0.154],
    [0.696, 0.099, 0.205],
    [0.702, 0.108, 0.190],
    [0.241, 0.117, 0.642],
    [0.208, 0.059, 0.733],
    [0.189, 0.000, 0.811],
    [0.823, 0.177, 0.000],
    [0.813, 0.184, 0.003],
    [0.689, 0.296, 0.015],
    [0.910, 0.090, 0.000],
    [0.895, 0.105, 0.000],
    [0.863, 0.137, 0.000],
    [0.969, 0.031, 0.000],
    [0.967, 0.033, 0.000],
    [0.919, 0.081, 0.000],
    [0.950, 0.005, 0.045],
    [0.968, 0.000, 0.032],
    [0.934, 0.009, 0.057],
];

/// Single-component basis (column means).
pub const K1_BASIS: [[f64; 1]; 18] = [
    [0.080],
    [0.078],
    [0.017],
    [0.025],
    [0.035],
    [0.062],
    [0.358],
    [0.033],
    [0.015],
    [0.066],
    [0.030],
    [0.036],
    [0.019],
    [0.006],
    [0.078],
    [0.036],
    [0.007],
    [0.019],
];

/// Latent budget basis, one column per component.
pub const LBA_BASIS: [[f64; 3]; 18] = [
    [0.002, 0.212, 0.063],
    [0.146, 0.017, 0.005],
    [0.024, 0.016, 0.005],
    [0.036, 0.016, 0.013],
    [0.037, 0.032, 0.033],
    [0.064, 0.067, 0.050],
    [0.361, 0.336, 0.382],
    [0.000, 0.006, 0.171],
    [0.016, 0.016, 0.009],
    [0.077, 0.058, 0.047],
    [0.022, 0.032, 0.044],
    [0.043, 0.024, 0.042],
    [0.020, 0.025, 0.008],
    [0.006, 0.007, 0.005],
    [0.077, 0.079, 0.077],
    [0.042, 0.034, 0.023],
    [0.008, 0.006, 0.007],
    [0.020, 0.016, 0.022],
];

/// End-member basis.
pub const EMA_BASIS: [[f64; 3]; 18] = [
    [0.000, 0.215, 0.064],
    [0.152, 0.016, 0.004],
    [0.025, 0.016, 0.000],
    [0.037, 0.016, 0.013],
    [0.037, 0.032, 0.033],
    [0.064, 0.067, 0.050],
    [0.358, 0.336, 0.381],
    [0.000, 0.004, 0.167],
    [0.016, 0.016, 0.009],
    [0.078, 0.058, 0.048],
    [0.021, 0.032, 0.044],
    [0.042, 0.023, 0.042],
    [0.020, 0.025, 0.009],
    [0.006, 0.007, 0.005],
    [0.076, 0.079, 0.078],
    [0.042, 0.034, 0.024],
    [0.007, 0.006, 0.007],
    [0.019, 0.016, 0.022],
];

/// Minimum-volume NMF basis.
pub const NMF_BASIS: [[f64; 3]; 18] = [
    [0.000, 0.218, 0.063],
    [0.147, 0.017, 0.004],
    [0.024, 0.016, 0.000],
    [0.036, 0.017, 0.013],
    [0.037, 0.032, 0.033],
    [0.064, 0.068, 0.050],
    [0.363, 0.335, 0.381],
    [0.000, 0.000, 0.169],
    [0.016, 0.016, 0.009],
    [0.077, 0.059, 0.047],
    [0.022, 0.032, 0.044],
    [0.043, 0.023, 0.042],
    [0.020, 0.026, 0.008],
    [0.006, 0.008, 0.005],
    [0.077, 0.079, 0.078],
    [0.042, 0.034, 0.024],
    [0.008, 0.006, 0.007],
    [0.020, 0.015, 0.022],
];

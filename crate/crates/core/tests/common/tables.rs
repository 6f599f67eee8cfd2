//! Source tables, transcribed independently of the bundled copies.
#![allow(dead_code)]

/// Self-assessed health by gender (Greenacre 2017, Exhibit 16.1).
pub const HEALTH_GENDER: [[f64; 2]; 5] = [
    [448.0, 369.0],
    [1789.0, 1753.0],
    [636.0, 859.0],
    [177.0, 237.0],
    [39.0, 64.0],
];

/// Education by readership (Greenacre 2017, Exhibit 3.1).
pub const EDUCATION_READERSHIP: [[f64; 3]; 5] = [
    [5.0, 7.0, 2.0],
    [18.0, 46.0, 20.0],
    [19.0, 29.0, 39.0],
    [12.0, 40.0, 49.0],
    [3.0, 7.0, 16.0],
];

/// Row profiles of the two tables above, rounded to three decimals.
pub const HEALTH_GENDER_PROFILES: [[f64; 2]; 5] = [
    [0.548, 0.452],
    [0.505, 0.495],
    [0.425, 0.575],
    [0.428, 0.572],
    [0.379, 0.621],
];

pub const EDUCATION_READERSHIP_PROFILES: [[f64; 3]; 5] = [
    [0.357, 0.500, 0.143],
    [0.214, 0.548, 0.238],
    [0.218, 0.333, 0.448],
    [0.119, 0.396, 0.485],
    [0.115, 0.269, 0.615],
];

/// Weekly minutes per activity by gender, age and year (Mooijaart et al. (1999)).
pub const TIME_BUDGET: [[f64; 18]; 30] = [
    [901.0, 87.0, 33.0, 120.0, 289.0, 508.0, 3737.0, 1447.0, 128.0, 515.0, 490.0, 419.0, 111.0, 48.0, 752.0, 272.0, 78.0, 146.0],
    [769.0, 157.0, 28.0, 138.0, 294.0, 528.0, 3765.0, 1455.0, 101.0, 505.0, 396.0, 436.0, 102.0, 41.0, 815.0, 256.0, 56.0, 240.0],
    [707.0, 155.0, 15.0, 127.0, 316.0, 527.0, 3744.0, 1537.0, 92.0, 449.0, 441.0, 485.0, 100.0, 64.0, 860.0, 188.0, 73.0, 200.0],
    [2180.0, 250.0, 194.0, 152.0, 293.0, 623.0, 3380.0, 124.0, 129.0, 609.0, 382.0, 269.0, 173.0, 69.0, 700.0, 366.0, 64.0, 124.0],
    [1992.0, 269.0, 206.0, 157.0, 316.0, 649.0, 3403.0, 245.0, 126.0, 649.0, 321.0, 279.0, 213.0, 35.0, 671.0, 318.0, 58.0, 172.0],
    [1899.0, 341.0, 184.0, 183.0, 302.0, 605.0, 3397.0, 208.0, 143.0, 599.0, 391.0, 271.0, 231.0, 67.0, 812.0, 243.0, 57.0, 148.0],
    [1901.0, 249.0, 99.0, 173.0, 351.0, 660.0, 3463.0, 56.0, 195.0, 671.0, 360.0, 206.0, 259.0, 88.0, 785.0, 316.0, 59.0, 188.0],
    [2008.0, 289.0, 128.0, 157.0, 339.0, 709.0, 3445.0, 90.0, 156.0, 593.0, 240.0, 280.0, 238.0, 45.0, 804.0, 343.0, 44.0, 170.0],
    [2093.0, 331.0, 136.0, 185.0, 332.0, 650.0, 3347.0, 85.0, 148.0, 479.0, 336.0, 291.0, 268.0, 64.0, 812.0, 319.0, 58.0, 146.0],
    [1708.0, 244.0, 51.0, 227.0, 350.0, 709.0, 3560.0, 18.0, 122.0, 603.0, 237.0, 209.0, 256.0, 116.0, 921.0, 468.0, 79.0, 203.0],
    [1357.0, 337.0, 54.0, 221.0, 364.0, 744.0, 3569.0, 58.0, 207.0, 704.0, 279.0, 299.0, 288.0, 76.0, 862.0, 413.0, 57.0, 190.0],
    [1206.0, 450.0, 25.0, 230.0, 352.0, 686.0, 3533.0, 46.0, 272.0, 554.0, 264.0, 316.0, 309.0, 112.0, 1012.0, 467.0, 68.0, 174.0],
    [176.0, 617.0, 124.0, 273.0, 365.0, 763.0, 3801.0, 10.0, 159.0, 811.0, 213.0, 297.0, 366.0, 86.0, 1161.0, 477.0, 157.0, 223.0],
    [71.0, 563.0, 27.0, 251.0, 392.0, 767.0, 3871.0, 43.0, 192.0, 671.0, 220.0, 403.0, 312.0, 117.0, 1198.0, 660.0, 92.0, 230.0],
    [95.0, 636.0, 38.0, 264.0, 383.0, 707.0, 3694.0, 54.0, 214.0, 619.0, 274.0, 476.0, 308.0, 178.0, 1233.0, 578.0, 104.0, 225.0],
    [723.0, 494.0, 135.0, 208.0, 359.0, 536.0, 3744.0, 1163.0, 125.0, 592.0, 364.0, 348.0, 90.0, 32.0, 594.0, 292.0, 73.0, 208.0],
    [665.0, 460.0, 99.0, 200.0, 377.0, 513.0, 3777.0, 1321.0, 88.0, 557.0, 400.0, 370.0, 76.0, 32.0, 581.0, 257.0, 74.0, 234.0],
    [564.0, 397.0, 86.0, 223.0, 387.0, 495.0, 3821.0, 1436.0, 80.0, 527.0, 396.0, 352.0, 86.0, 41.0, 702.0, 207.0, 63.0, 214.0],
    [439.0, 1342.0, 635.0, 347.0, 311.0, 593.0, 3526.0, 77.0, 85.0, 780.0, 316.0, 306.0, 149.0, 41.0, 547.0, 300.0, 88.0, 199.0],
    [471.0, 1338.0, 673.0, 336.0, 339.0, 607.0, 3532.0, 115.0, 115.0, 776.0, 270.0, 352.0, 131.0, 32.0, 497.0, 275.0, 54.0, 167.0],
    [704.0, 1147.0, 651.0, 336.0, 337.0, 572.0, 3447.0, 120.0, 115.0, 736.0, 303.0, 368.0, 145.0, 44.0, 565.0, 265.0, 63.0, 164.0],
    [299.0, 1567.0, 296.0, 372.0, 325.0, 664.0, 3567.0, 104.0, 133.0, 694.0, 225.0, 335.0, 198.0, 37.0, 622.0, 356.0, 76.0, 207.0],
    [375.0, 1605.0, 309.0, 347.0, 346.0, 633.0, 3554.0, 98.0, 143.0, 689.0, 229.0, 440.0, 154.0, 34.0, 576.0, 311.0, 63.0, 174.0],
    [412.0, 1529.0, 308.0, 373.0, 351.0, 656.0, 3444.0, 68.0, 196.0, 699.0, 277.0, 453.0, 170.0, 45.0, 582.0, 307.0, 59.0, 153.0],
    [151.0, 1600.0, 83.0, 376.0, 367.0, 601.0, 3673.0, 27.0, 195.0, 758.0, 255.0, 323.0, 197.0, 53.0, 710.0, 478.0, 78.0, 154.0],
    [153.0, 1558.0, 84.0, 335.0, 368.0, 613.0, 3701.0, 30.0, 179.0, 810.0, 212.0, 504.0, 190.0, 41.0, 644.0, 390.0, 53.0, 212.0],
    [233.0, 1487.0, 82.0, 352.0, 385.0, 595.0, 3566.0, 40.0, 195.0, 721.0, 268.0, 545.0, 217.0, 76.0, 708.0, 377.0, 64.0, 170.0],
    [11.0, 1319.0, 78.0, 384.0, 372.0, 635.0, 3849.0, 6.0, 108.0, 929.0, 219.0, 297.0, 169.0, 37.0, 888.0, 485.0, 63.0, 230.0],
    [6.0, 1409.0, 154.0, 292.0, 453.0, 665.0, 3713.0, 21.0, 124.0, 796.0, 187.0, 482.0, 191.0, 39.0, 860.0, 404.0, 67.0, 216.0],
    [19.0, 1318.0, 44.0, 320.0, 366.0, 615.0, 3675.0, 23.0, 139.0, 749.0, 202.0, 579.0, 169.0, 52.0, 1076.0, 460.0, 69.0, 204.0],
];

"""p-adic limits of periodic orbits and period growth over finite fields."""

from dynamon.ffdyn import curve_period_survey, field, orbit, power_census
from dynamon.padic import PAdicMap, invlim_iterate, lift_agreement

fmap = PAdicMap.unicritical(2, 2, 2)  # z^2 + 2 over Z_2
res = invlim_iterate(fmap, 0, prec=16)
print("limit of z^2 + 2 from 0:", res.point[0], "valuations", res.valuations)
print("agrees with Newton:", lift_agreement(fmap, 0, 16)["agree"])

F = field(2, 8)
rec = orbit(F, 2, 3, 5)
print(f"in F_256, 5 under z^2 + 3: preperiod {rec.preperiod}, period {rec.period}")

census = power_census(2, 2, 10**4)
print("distinct periods of roots of unity under squaring:", census["distinct_at_checkpoints"])

survey = curve_period_survey(2, 2, "diag", k_max=12)
for row in survey["rows"]:
    print(f"k={row['k']:2d} max period {row['max_period']:5d} distinct {row['distinct_periods']}")

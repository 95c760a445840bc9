// Copyright (c) carol
package acc

// Accumulator keeps a running total.
type Accumulator struct {
	total int64
}

// Add folds one value into the total.
func (a *Accumulator) Add(value int64) {
	a.total += value
}

// SumAll adds every value.
func SumAll(values []int64) int64 {
	acc := &Accumulator{}
	for _, v := range values {
		acc.Add(v)
	}
	return acc.total
}

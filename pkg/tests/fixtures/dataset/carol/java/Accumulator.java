// Copyright (c) carol
import java.util.List;

public final class Accumulator
{
    private long total;

    public void add(long value)
    {
        total += value;
    }

    public long getTotal()
    {
        return total;
    }

    public static long sumAll(List<Long> values)
    {
        Accumulator acc = new Accumulator();
        for (long v : values)
        {
            acc.add(v);
        }
        return acc.getTotal();
    }
}

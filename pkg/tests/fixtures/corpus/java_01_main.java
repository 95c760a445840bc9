import java.util.*;
import java.io.*;

public class Main {
    static int[] memo;

    /**
     * Fibonacci with memoisation.
     */
    static int fib(int n) {
        if (n < 2) return n;
        if (memo[n] != 0) return memo[n];
        return memo[n] = fib(n - 1) + fib(n - 2);
    }

    public static void main(String[] args) throws IOException {
        BufferedReader br = new BufferedReader(new InputStreamReader(System.in));
        int n = Integer.parseInt(br.readLine().trim());
        memo = new int[n + 1];
        System.out.println(fib(n));
    }
}

using System;
using System.Collections.Generic;

namespace Demo
{
    /// <summary>Counts word frequencies.</summary>
    public static class WordCounter
    {
        public static Dictionary<string, int> Count(string text)
        {
            var result = new Dictionary<string, int>();
            if (string.IsNullOrEmpty(text))
                return result;
            foreach (var w in text.Split(' '))
            {
                if (w.Length == 0) continue;
                result[w] = result.TryGetValue(w, out var c) ? c + 1 : 1;
            }
            return result;
        }

        public static void Main(string[] args)
        {
            var path = @"C:\data\in.txt";
            try
            {
                var counts = Count(Console.ReadLine());
                foreach (var kv in counts)
                    Console.WriteLine($"{kv.Key}: {kv.Value}");
            }
            catch (Exception ex)
            {
                Console.WriteLine(ex.Message + path);
            }
        }
    }
}
